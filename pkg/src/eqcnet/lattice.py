"""Finite patches of the periodic 2D lattices used as quantum networks.

Every patch is an undirected multigraph.  Nodes sit at Euclidean positions
with nearest-neighbour spacing 1; each edge record carries a multiplicity
(the number of parallel entangled pairs on that bond).

Patch shapes
------------
square
    sites ``(i, j)`` with ``|i|, |j| <= L`` at position ``(i, j)``.
triangle
    sites ``(i, j)`` with ``|i|, |j| <= L`` at ``i*(1, 0) + j*(1/2, sqrt(3)/2)``
    (a 60 degree parallelogram).
hexagon family
    unit cells ``(i, j)`` with ``|i|, |j| <= L``; cell ``(i, j)`` holds an
    A site at ``i*(sqrt(3), 0) + j*(sqrt(3)/2, 3/2)`` and a B site one unit
    above it.  The vertical A-B bond is doubled in ``hexagon-third-double``;
    all bonds are doubled in ``hexagon-double``.

Boundaries are free.  Node ids are row-major by position (``y`` then ``x``);
edge ids follow the sorted ``(u, v)`` endpoint pairs with ``u < v``.
"""

import json
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

SQRT3 = math.sqrt(3.0)


class LatticeKind(str, Enum):
    SQUARE = "square"
    TRIANGLE = "triangle"
    HEXAGON = "hexagon"
    HEXAGON_DOUBLE = "hexagon-double"
    HEXAGON_THIRD_DOUBLE = "hexagon-third-double"


COORDINATION = {
    LatticeKind.SQUARE: 4,
    LatticeKind.TRIANGLE: 6,
    LatticeKind.HEXAGON: 3,
    LatticeKind.HEXAGON_DOUBLE: 6,
    LatticeKind.HEXAGON_THIRD_DOUBLE: 4,
}

@dataclass(frozen=True)
class EntangledBondSpec:
    """Pure bond state sqrt(l1)|00> + sqrt(l2)|11> with l1 >= l2."""

    lambda1: float

    def __post_init__(self):
        if not 0.5 <= self.lambda1 <= 1.0:
            raise ValueError(f"lambda1 must lie in [1/2, 1], got {self.lambda1}")

    @property
    def lambda2(self):
        return 1.0 - self.lambda1


def scp_from_state(spec):
    """Optimal singlet conversion probability of one bond."""
    if not isinstance(spec, EntangledBondSpec):
        spec = EntangledBondSpec(float(spec))
    return min(1.0, 2.0 * (1.0 - spec.lambda1))


def joint_scp(p):
    """Conversion probability of a double bond treated as one state.

    Two copies with per-copy SCP ``p`` have largest Schmidt coefficient
    ``(1 - p/2)**2``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return min(1.0, 2.0 * (1.0 - (1.0 - 0.5 * p) ** 2))


@dataclass(frozen=True, eq=False)
class LatticeGraph:
    """Immutable multigraph patch.

    ``joint`` optionally marks single-copy edges that stand for a double bond
    converted as a whole; the sampler applies the joint conversion
    probability to them.
    """

    kind: LatticeKind
    extent: int
    pos: np.ndarray
    edges: np.ndarray
    mult: np.ndarray
    coordination: int
    joint: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("pos", "edges", "mult", "joint"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n_nodes(self):
        return len(self.pos)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_copies(self):
        return int(self.mult.sum())

    @cached_property
    def degree(self):
        """Incident multiplicity per node."""
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], self.mult)
        np.add.at(deg, self.edges[:, 1], self.mult)
        deg.setflags(write=False)
        return deg

    @cached_property
    def csr(self):
        """``(indptr, neighbour, edge_id)`` adjacency arrays."""
        n = self.n_nodes
        ends = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        others = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eids = np.concatenate([np.arange(self.n_edges)] * 2)
        order = np.lexsort((eids, ends))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, ends + 1, 1)
        indptr = np.cumsum(indptr)
        return indptr, others[order].astype(np.int64), eids[order].astype(np.int64)

    @cached_property
    def outward_csr(self):
        """:attr:`csr` with each neighbour list ordered by decreasing rim distance.

        A LIFO search pops the last-pushed neighbour first, so this ordering
        makes it head straight for the rim.
        """
        indptr, nbr, eid = self.csr
        nbr, eid = nbr.copy(), eid.copy()
        rim = self.rim_distance
        for u in range(self.n_nodes):
            a, b = indptr[u], indptr[u + 1]
            order = np.argsort(-rim[nbr[a:b]], kind="stable")
            nbr[a:b] = nbr[a:b][order]
            eid[a:b] = eid[a:b][order]
        return indptr, nbr, eid

    @cached_property
    def _pos_index(self):
        return {_pos_key(x, y): i for i, (x, y) in enumerate(self.pos)}

    @cached_property
    def rim_distance(self):
        """Hop distance of every node from the patch rim."""
        indptr, nbr, _ = self.csr
        dist = np.full(self.n_nodes, -1, dtype=np.int64)
        queue = deque()
        for v in np.flatnonzero(self.degree < self.coordination):
            dist[v] = 0
            queue.append(int(v))
        while queue:
            u = queue.popleft()
            for w in nbr[indptr[u]:indptr[u + 1]]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(int(w))
        dist.setflags(write=False)
        return dist

    @property
    def origin(self):
        return self._pos_index[_pos_key(0.0, 0.0)]

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "extent": int(self.extent),
            "nodes": [
                {"id": i, "x": round(float(x), 12), "y": round(float(y), 12)}
                for i, (x, y) in enumerate(self.pos)
            ],
            "edges": [
                {"id": e, "u": int(u), "v": int(v), "mult": int(m)}
                for e, ((u, v), m) in enumerate(zip(self.edges, self.mult))
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _pos_key(x, y):
    return (round(float(x), 6) + 0.0, round(float(y), 6) + 0.0)


def build_graph(kind, extent, positions, edge_list, coordination, joint=None):
    """Assemble a graph with canonical node and edge ordering.

    ``edge_list`` holds ``(u, v, mult)`` triples indexed into ``positions``.
    """
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    keys = [_pos_key(x, y) for x, y in pos]
    order = sorted(range(len(pos)), key=lambda i: (keys[i][1], keys[i][0]))
    relabel = np.empty(len(pos), dtype=np.int64)
    relabel[order] = np.arange(len(pos))

    recs = []
    for idx, (u, v, m) in enumerate(edge_list):
        a, b = int(relabel[u]), int(relabel[v])
        if a == b:
            raise ValueError("self-loop in lattice edge list")
        j = bool(joint[idx]) if joint is not None else False
        recs.append((min(a, b), max(a, b), int(m), j))
    recs.sort()
    edges = np.array([(a, b) for a, b, _, _ in recs], dtype=np.int64).reshape(-1, 2)
    mult = np.array([m for _, _, m, _ in recs], dtype=np.int64)
    joint_arr = np.array([j for *_, j in recs], dtype=bool) if joint is not None else None
    return LatticeGraph(
        kind=LatticeKind(kind),
        extent=int(extent),
        pos=pos[order],
        edges=edges,
        mult=mult,
        coordination=int(coordination),
        joint=joint_arr,
    )


def _square(L):
    index = {}
    pts = []
    for j in range(-L, L + 1):
        for i in range(-L, L + 1):
            index[i, j] = len(pts)
            pts.append((i, j))
    edges = []
    for (i, j), u in index.items():
        for di, dj in ((1, 0), (0, 1)):
            v = index.get((i + di, j + dj))
            if v is not None:
                edges.append((u, v, 1))
    return pts, edges


def _triangle(L):
    index = {}
    pts = []
    for j in range(-L, L + 1):
        for i in range(-L, L + 1):
            index[i, j] = len(pts)
            pts.append((i + 0.5 * j, 0.5 * SQRT3 * j))
    edges = []
    for (i, j), u in index.items():
        for di, dj in ((1, 0), (0, 1), (-1, 1)):
            v = index.get((i + di, j + dj))
            if v is not None:
                edges.append((u, v, 1))
    return pts, edges


def _hexagon(L, class_mult):
    index = {}
    pts = []
    for j in range(-L, L + 1):
        for i in range(-L, L + 1):
            x, y = SQRT3 * i + 0.5 * SQRT3 * j, 1.5 * j
            index[i, j, 0] = len(pts)
            pts.append((x, y))
            index[i, j, 1] = len(pts)
            pts.append((x, y + 1.0))
    edges = []
    for j in range(-L, L + 1):
        for i in range(-L, L + 1):
            a = index[i, j, 0]
            # bond classes: vertical, lower-left, lower-right
            for cls, (bi, bj) in enumerate(((i, j), (i, j - 1), (i + 1, j - 1))):
                b = index.get((bi, bj, 1))
                if b is not None:
                    edges.append((a, b, class_mult[cls]))
    return pts, edges


def generate(kind, extent):
    """Lattice patch of half-width ``extent`` centred on the origin node."""
    kind = LatticeKind(kind)
    L = int(extent)
    if L != extent or L < 1:
        raise ValueError(f"extent must be a positive integer, got {extent!r}")
    if kind is LatticeKind.SQUARE:
        pts, edges = _square(L)
    elif kind is LatticeKind.TRIANGLE:
        pts, edges = _triangle(L)
    elif kind is LatticeKind.HEXAGON:
        pts, edges = _hexagon(L, (1, 1, 1))
    elif kind is LatticeKind.HEXAGON_DOUBLE:
        pts, edges = _hexagon(L, (2, 2, 2))
    else:
        pts, edges = _hexagon(L, (2, 1, 1))
    return build_graph(kind, L, pts, edges, COORDINATION[kind])


def axis_position(kind, offset):
    """Geometric position addressed by an integer lattice-axis offset.

    Square and triangle offsets are lattice coordinates ``(a, b)``.  On the
    hexagon family ``a`` counts nodes along the armchair axis through the
    origin (node spacings alternate 1, 2) and ``b`` shifts by whole unit
    cells along the zigzag axis.
    """
    a, b = (int(v) for v in offset)
    kind = LatticeKind(kind)
    if kind is LatticeKind.SQUARE:
        return float(a), float(b)
    if kind is LatticeKind.TRIANGLE:
        return a + 0.5 * b, 0.5 * SQRT3 * b
    t, odd = divmod(a, 2)
    return SQRT3 * b, 3.0 * t + odd


def node_at(graph, offset):
    """Node id at the given lattice-axis offset from the origin."""
    x, y = axis_position(graph.kind, offset)
    try:
        return graph._pos_index[_pos_key(x, y)]
    except KeyError:
        raise ValueError(f"offset {tuple(offset)} lies outside the {graph.kind.value} patch") from None


def boundary_nodes(graph):
    """Rim nodes: incident multiplicity below the coordination number."""
    return set(np.flatnonzero(graph.degree < graph.coordination).tolist())


def graph_from_dict(doc):
    """Inverse of :meth:`LatticeGraph.to_dict` for natively generated kinds."""
    kind = LatticeKind(doc["kind"])
    nodes = sorted(doc["nodes"], key=lambda n: n["id"])
    pts = [(n["x"], n["y"]) for n in nodes]
    edges = [(e["u"], e["v"], e["mult"]) for e in sorted(doc["edges"], key=lambda e: e["id"])]
    return build_graph(kind, doc["extent"], pts, edges, COORDINATION[kind])
