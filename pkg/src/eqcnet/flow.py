"""Exclusive channel counting by exact integral max-flow.

A channel is an open path between the two parties; channels may share
nodes (a node can swap for any number of channels) but never a bond copy.
The channel count of one realization is therefore the maximum flow with
per-edge capacity equal to the number of open copies, where each undirected
edge is a pair of antiparallel arcs sharing that capacity.

Flow is stored per edge as a signed amount in the ``u -> v`` direction, so
arc ``u -> v`` has residual ``cap - f`` and arc ``v -> u`` has ``cap + f``.
Multi-node parties attach to an implicit super-source/super-sink through
unbounded arcs, realized by seeding the search with every source node.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import boundary_nodes
from .percolation import draw_copies, fill_capacity
from .rng import trial_key


@njit(inline="always")
def _open_copies(e, ctx):
    """Capacity of edge ``e`` in the current trial, drawn on first use.

    ``ctx`` bundles ``(cap, flow, drawn, trial_tag, mult, p_edge, k0, k1)``;
    an edge whose ``drawn`` tag differs from ``trial_tag`` has not been
    looked at in this trial, so its copies are drawn and its flow reset.
    """
    cap, flow, drawn, tag, mult, p_edge, k0, k1 = ctx
    if drawn[e] != tag:
        cap[e] = draw_copies(k0, k1, e, mult[e], p_edge[e])
        flow[e] = 0
        drawn[e] = tag
    return cap[e]


@njit(inline="always")
def _residual(e, u, eu, ctx):
    c = _open_copies(e, ctx)
    if eu[e] == u:
        return c - ctx[1][e]
    return c + ctx[1][e]


@njit(nogil=True, cache=True)
def _search(indptr, nbr, eid, eu, ctx, sources, is_sink, lifo, seen, tag, parent_arc, parent_node, work):
    """Residual-graph search from all sources; returns a reached sink or -1.

    Nodes are marked when discovered (``seen[v] = tag``), so parent arcs
    form a tree for both FIFO (breadth-first) and LIFO order.
    """
    n_work = 0
    for s in sources:
        if seen[s] != tag:
            seen[s] = tag
            parent_arc[s] = -1
            work[n_work] = s
            n_work += 1
    head = 0
    while head < n_work:
        if lifo:
            n_work -= 1
            u = work[n_work]
        else:
            u = work[head]
            head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            if seen[v] == tag:
                continue
            if _residual(eid[k], u, eu, ctx) <= 0:
                continue
            seen[v] = tag
            parent_arc[v] = k
            parent_node[v] = u
            if is_sink[v]:
                return v
            work[n_work] = v
            n_work += 1
    return -1


@njit(inline="always")
def _push(e, u, eu, flow, delta):
    if eu[e] == u:
        flow[e] += delta
    else:
        flow[e] -= delta


@njit(nogil=True, cache=True)
def _bisearch(indptr, nbr, eid, eu, ctx, sources, sinks, seen, seen_back, tag,
              parent_arc, parent_node, back_arc, back_node, work, work_back):
    """Bidirectional breadth-first residual search.

    Grows whichever frontier is smaller and stops as soon as either side is
    exhausted, so a party sealed off by closed bonds is detected after
    exploring only its own small pocket.  Returns the meeting node or -1.
    """
    nf = 0
    for s in sources:
        seen[s] = tag
        parent_arc[s] = -1
        work[nf] = s
        nf += 1
    nb = 0
    for t in sinks:
        seen_back[t] = tag
        back_arc[t] = -1
        work_back[nb] = t
        nb += 1
    hf = 0
    hb = 0
    while hf < nf and hb < nb:
        if nf - hf <= nb - hb:
            u = work[hf]
            hf += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = nbr[k]
                if seen[v] == tag or _residual(eid[k], u, eu, ctx) <= 0:
                    continue
                seen[v] = tag
                parent_arc[v] = k
                parent_node[v] = u
                if seen_back[v] == tag:
                    return v
                work[nf] = v
                nf += 1
        else:
            v = work_back[hb]
            hb += 1
            for k in range(indptr[v], indptr[v + 1]):
                u = nbr[k]
                if seen_back[u] == tag or _residual(eid[k], u, eu, ctx) <= 0:
                    continue
                seen_back[u] = tag
                back_arc[u] = k
                back_node[u] = v
                if seen[u] == tag:
                    return u
                work_back[nb] = u
                nb += 1
    return -1


@njit(nogil=True, cache=True)
def _max_flow(indptr, nbr, eid, eu, ctx, sources, sinks, is_sink, lifo, seen, tag0, scratch):
    """Augment until no path remains; returns ``(value, next unused tag)``."""
    # open capacity at either party bounds the flow; stopping there skips
    # the final failing search in most trials
    limit = 0
    for s in sources:
        for k in range(indptr[s], indptr[s + 1]):
            limit += _open_copies(eid[k], ctx)
    sink_cap = 0
    for v in sinks:
        for k in range(indptr[v], indptr[v + 1]):
            sink_cap += _open_copies(eid[k], ctx)
    if sink_cap < limit:
        limit = sink_cap
    value = 0
    tag = tag0
    flow = ctx[1]
    seen_back = scratch[0]
    parent_arc = scratch[1]
    parent_node = scratch[2]
    back_arc = scratch[3]
    back_node = scratch[4]
    work = scratch[5]
    work_back = scratch[6]
    while value < limit:
        if lifo:
            meet = _search(indptr, nbr, eid, eu, ctx, sources, is_sink, True, seen, tag,
                           parent_arc, parent_node, work)
        else:
            meet = _bisearch(indptr, nbr, eid, eu, ctx, sources, sinks, seen, seen_back, tag,
                             parent_arc, parent_node, back_arc, back_node, work, work_back)
        tag += 1
        if meet < 0:
            break
        # path: source ... meet via parent links, meet ... sink via back links
        delta = limit - value
        v = meet
        while parent_arc[v] >= 0:
            u = parent_node[v]
            r = _residual(eid[parent_arc[v]], u, eu, ctx)
            if r < delta:
                delta = r
            v = u
        if not lifo:
            u = meet
            while back_arc[u] >= 0:
                r = _residual(eid[back_arc[u]], u, eu, ctx)
                if r < delta:
                    delta = r
                u = back_node[u]
        v = meet
        while parent_arc[v] >= 0:
            u = parent_node[v]
            _push(eid[parent_arc[v]], u, eu, flow, delta)
            v = u
        if not lifo:
            u = meet
            while back_arc[u] >= 0:
                _push(eid[back_arc[u]], u, eu, flow, delta)
                u = back_node[u]
        value += delta
    return value, tag


@njit(cache=True)
def _scratch(n):
    """Per-node work arrays; ``scratch[0]`` is the backward ``seen`` tag array."""
    out = np.empty((7, n), dtype=np.int64)
    out[0, :] = -1
    return out


@njit(nogil=True, cache=True)
def _trial_flows(indptr, nbr, eid, eu, mult, p_edge, seed, first_trial, sources, sinks, is_sink, lifo, out):
    n = indptr.shape[0] - 1
    m = mult.shape[0]
    cap = np.zeros(m, dtype=np.int64)
    flow = np.zeros(m, dtype=np.int64)
    drawn = np.full(m, -1, dtype=np.int64)
    seen = np.full(n, -1, dtype=np.int64)
    scratch = _scratch(n)
    tag = 0
    for t in range(out.shape[0]):
        k0, k1 = trial_key(seed, first_trial + t)
        ctx = (cap, flow, drawn, np.int64(t), mult, p_edge, k0, k1)
        out[t], tag = _max_flow(indptr, nbr, eid, eu, ctx, sources, sinks, is_sink, lifo,
                                seen, tag, scratch)


@njit(nogil=True, cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(nogil=True, cache=True)
def largest_cluster(n, eu, ev, cap):
    """Size of the largest component joined by edges with ``cap > 0``."""
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    best = 1 if n > 0 else 0
    for e in range(eu.shape[0]):
        if cap[e] <= 0:
            continue
        a = _find(parent, eu[e])
        b = _find(parent, ev[e])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        if size[a] > best:
            best = size[a]
    return best


@njit(nogil=True, cache=True)
def _trial_clusters(n, eu, ev, mult, p_edge, seed, first_trial, out):
    cap = np.empty(mult.shape[0], dtype=np.int64)
    for t in range(out.shape[0]):
        fill_capacity(mult, p_edge, seed, first_trial + t, cap)
        out[t] = largest_cluster(n, eu, ev, cap)


@dataclass(frozen=True, eq=False)
class FlowProblem:
    graph: object
    capacities: np.ndarray
    sources: frozenset
    sinks: frozenset

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(int(s) for s in self.sources))
        object.__setattr__(self, "sinks", frozenset(int(s) for s in self.sinks))
        if not self.sources or not self.sinks:
            raise ValueError("sources and sinks must be nonempty")
        if self.sources & self.sinks:
            raise ValueError("sources and sinks must be disjoint")
        cap = np.asarray(self.capacities, dtype=np.int64)
        if cap.shape != (self.graph.n_edges,):
            raise ValueError("one capacity per edge is required")
        if (cap < 0).any() or (cap > self.graph.mult).any():
            raise ValueError("capacities must lie within [0, multiplicity]")
        object.__setattr__(self, "capacities", cap)


def _arrays(problem):
    g = problem.graph
    indptr, nbr, eid = g.csr
    is_sink = np.zeros(g.n_nodes, dtype=np.bool_)
    is_sink[list(problem.sinks)] = True
    sources = np.array(sorted(problem.sources), dtype=np.int64)
    sinks = np.array(sorted(problem.sinks), dtype=np.int64)
    return indptr, nbr, eid, np.ascontiguousarray(g.edges[:, 0]), sources, sinks, is_sink


def _fixed_context(problem, flow):
    # every edge pre-tagged as drawn, so capacities come from the problem
    m = problem.graph.n_edges
    return (problem.capacities.copy(), flow, np.zeros(m, dtype=np.int64), np.int64(0),
            problem.graph.mult, np.zeros(m), np.uint64(0), np.uint64(0))


def _solve(problem):
    indptr, nbr, eid, eu, sources, sinks, is_sink = _arrays(problem)
    n = problem.graph.n_nodes
    flow = np.zeros(problem.graph.n_edges, dtype=np.int64)
    ctx = _fixed_context(problem, flow)
    value, _ = _max_flow(indptr, nbr, eid, eu, ctx, sources, sinks, is_sink, False,
                         np.full(n, -1, dtype=np.int64), 0, _scratch(n))
    return int(value), flow


def max_channels(problem):
    """Maximum number of bond-disjoint open source-sink paths."""
    return _solve(problem)[0]


def min_cut(problem):
    """Edge ids of a minimum cut separating sources from sinks."""
    indptr, nbr, eid, eu, sources, sinks, is_sink = _arrays(problem)
    _, flow = _solve(problem)
    n = problem.graph.n_nodes
    seen = np.full(n, -1, dtype=np.int64)
    ctx = _fixed_context(problem, flow)
    _search(indptr, nbr, eid, eu, ctx, sources, is_sink, False, seen, 0,
            np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64))
    reach = seen == 0
    edges = problem.graph.edges
    crossing = reach[edges[:, 0]] != reach[edges[:, 1]]
    return set(np.flatnonzero(crossing & (problem.capacities > 0)).tolist())


def flow_paths(problem):
    """Decompose a maximum flow into explicit node paths, one per channel."""
    _, flow = _solve(problem)
    edges = problem.graph.edges
    # directed unit arcs left after cancelling opposite flow
    out = {}
    for e in np.flatnonzero(flow):
        u, v = (int(x) for x in edges[e])
        if flow[e] < 0:
            u, v = v, u
        out.setdefault(u, []).extend([v] * abs(int(flow[e])))
    paths = []
    for s in sorted(problem.sources):
        while out.get(s):
            path = [s]
            seen = {s: 0}
            while path[-1] not in problem.sinks:
                nxt = out[path[-1]].pop()
                if nxt in seen:
                    # drop a circulation picked up on the way
                    del path[seen[nxt] + 1:]
                    seen = {v: i for i, v in enumerate(path)}
                    continue
                seen[nxt] = len(path)
                path.append(nxt)
            paths.append(path)
    return paths


def to_infinity_problem(graph, sample, terminals):
    """Terminals send to the patch rim, which stands in for infinity."""
    terminals = {int(t) for t in terminals}
    rim = boundary_nodes(graph)
    if terminals & rim:
        raise ValueError("terminals must be interior nodes")
    cap = sample.open_capacity if hasattr(sample, "open_capacity") else sample
    return FlowProblem(graph, cap, frozenset(terminals), frozenset(rim))


def trial_flows(graph, p_edge, seed, first_trial, n_trials, sources, sinks, lifo=None):
    """Channel counts for trials ``first_trial .. first_trial+n_trials-1``.

    ``lifo`` selects depth-first-like search order, which reaches a distant
    rim much faster than breadth-first; by default it is used when there are
    more sinks than sources.
    """
    is_sink = np.zeros(graph.n_nodes, dtype=np.bool_)
    is_sink[list(sinks)] = True
    if lifo is None:
        lifo = len(sinks) > 4 * len(sources)
    indptr, nbr, eid = graph.outward_csr if lifo else graph.csr
    out = np.empty(n_trials, dtype=np.int64)
    _trial_flows(indptr, nbr, eid, np.ascontiguousarray(graph.edges[:, 0]), graph.mult,
                 np.asarray(p_edge, dtype=np.float64), np.uint64(seed), first_trial,
                 np.array(sorted(sources), dtype=np.int64),
                 np.array(sorted(sinks), dtype=np.int64), is_sink, bool(lifo), out)
    return out


def trial_clusters(graph, p_edge, seed, first_trial, n_trials):
    """Largest open-cluster size per trial."""
    out = np.empty(n_trials, dtype=np.int64)
    _trial_clusters(graph.n_nodes, np.ascontiguousarray(graph.edges[:, 0]),
                    np.ascontiguousarray(graph.edges[:, 1]), graph.mult,
                    np.asarray(p_edge, dtype=np.float64), np.uint64(seed), first_trial, out)
    return out
