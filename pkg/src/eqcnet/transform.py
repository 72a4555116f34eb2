"""Lattice transformations by entanglement swapping and their EQC.

Strategies, each with its source lattice:

``dhex-joint``
    double-bond hexagon; each double bond converted as one state with
    conversion probability ``joint_scp(p)``.
``dhex2tri``
    double-bond hexagon; one sublattice swaps every pair of its bonds,
    leaving a single-bond triangular lattice on the other sublattice.
``dhex-separate``
    double-bond hexagon used as two independent single-bond hexagons.
``tdhex2sq``
    hexagon with 1/3 double bonds; nodes next to a double bond swap it
    against their single bonds, contracting it into a square lattice.
``tdhex-joint`` / ``tdhex-separate``
    the 1/3-double hexagon with double bonds converted jointly, or kept as
    two independently converted copies.

Swapped bonds keep the per-copy conversion probability ``p``.  Whatever the
strategy, EQC is normalized by the channel count of the *source* lattice at
``p = 1``, i.e. the original entanglement resources.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .lattice import COORDINATION, SQRT3, LatticeKind, build_graph, generate, joint_scp
from .montecarlo import (DEFAULT_EXTENT, DEFAULT_SEED, DEFAULT_TRIALS, Mode, ScenarioSpec,
                         place_terminals, point_seed, run_trials, summarize)
from .percolation import copy_probabilities
from .rng import check_seed, derive_seed

P_SWAP_FIXED = 2.0 - math.sqrt(2.0)


class TransformKind(str, Enum):
    DOUBLE_HEX_JOINT = "dhex-joint"
    DOUBLE_HEX_TO_TRIANGLE = "dhex2tri"
    DOUBLE_HEX_SEPARATE = "dhex-separate"
    THIRD_DOUBLE_HEX_TO_SQUARE = "tdhex2sq"
    THIRD_DOUBLE_HEX_JOINT = "tdhex-joint"
    THIRD_DOUBLE_HEX_SEPARATE = "tdhex-separate"


SOURCE_KIND = {
    TransformKind.DOUBLE_HEX_JOINT: LatticeKind.HEXAGON_DOUBLE,
    TransformKind.DOUBLE_HEX_TO_TRIANGLE: LatticeKind.HEXAGON_DOUBLE,
    TransformKind.DOUBLE_HEX_SEPARATE: LatticeKind.HEXAGON_DOUBLE,
    TransformKind.THIRD_DOUBLE_HEX_TO_SQUARE: LatticeKind.HEXAGON_THIRD_DOUBLE,
    TransformKind.THIRD_DOUBLE_HEX_JOINT: LatticeKind.HEXAGON_THIRD_DOUBLE,
    TransformKind.THIRD_DOUBLE_HEX_SEPARATE: LatticeKind.HEXAGON_THIRD_DOUBLE,
}


def scp_forward(p):
    """Joint conversion probability of a double bond from its per-copy ``p``.

    Only defined up to ``p = 2 - sqrt(2)``, where it reaches 1.
    """
    if not 0.0 <= p <= P_SWAP_FIXED + 1e-15:
        raise ValueError(f"p must lie in [0, 2 - sqrt(2)], got {p}")
    return min(1.0, 2.0 * (1.0 - (1.0 - 0.5 * p) ** 2))


def scp_inverse(p_prime):
    if not 0.0 <= p_prime <= 1.0:
        raise ValueError(f"p' must lie in [0, 1], got {p_prime}")
    return 2.0 * (1.0 - math.sqrt(1.0 - 0.5 * p_prime))


def _sublattice(graph):
    """Two-colouring of a bipartite patch; the origin gets colour 0."""
    indptr, nbr, _ = graph.csr
    colour = np.full(graph.n_nodes, -1, dtype=np.int64)
    for root in [graph.origin] + list(range(graph.n_nodes)):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for w in nbr[indptr[u]:indptr[u + 1]]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    stack.append(int(w))
                elif colour[w] == colour[u]:
                    raise ValueError("graph is not bipartite")
    return colour


def _to_triangle(graph):
    colour = _sublattice(graph)
    keep = np.flatnonzero(colour == 0)
    new_id = {int(v): i for i, v in enumerate(keep)}
    indptr, nbr, _ = graph.csr
    edges = set()
    for b in np.flatnonzero(colour == 1):
        around = sorted(int(a) for a in nbr[indptr[b]:indptr[b + 1]])
        for x in range(len(around)):
            for y in range(x + 1, len(around)):
                pair = (new_id[around[x]], new_id[around[y]])
                if pair in edges:
                    raise ValueError("swapping produced a duplicate bond")
                edges.add(pair)
    pos = graph.pos[keep] / SQRT3
    return build_graph(LatticeKind.TRIANGLE, graph.extent, pos, [(u, v, 1) for u, v in sorted(edges)],
                       COORDINATION[LatticeKind.TRIANGLE])


def _to_square(graph):
    rep = np.full(graph.n_nodes, -1, dtype=np.int64)
    pos = []
    for (u, v), m in zip(graph.edges, graph.mult):
        if m != 2:
            continue
        lower = u if graph.pos[u, 1] < graph.pos[v, 1] else v
        x, y = graph.pos[lower]
        j = round(y / 1.5)
        i = round((x - 0.5 * SQRT3 * j) / SQRT3)
        rep[u] = rep[v] = len(pos)
        pos.append((i, i + j))
    if (rep < 0).any():
        raise ValueError("every node must touch exactly one double bond")
    edges = [(rep[u], rep[v], 1) for (u, v), m in zip(graph.edges, graph.mult) if m == 1]
    return build_graph(LatticeKind.SQUARE, graph.extent, pos, edges, COORDINATION[LatticeKind.SQUARE])


def merge_double_bonds(graph):
    """Same hexagonal topology with every double bond marked for joint conversion."""
    edges = [(u, v, 1) for u, v in graph.edges]
    return build_graph(graph.kind, graph.extent, graph.pos, edges,
                       COORDINATION[LatticeKind.HEXAGON], joint=graph.mult == 2)


def _single_copy(graph):
    edges = [(u, v, 1) for u, v in graph.edges]
    return build_graph(LatticeKind.HEXAGON, graph.extent, graph.pos, edges, COORDINATION[LatticeKind.HEXAGON])


def transform_graph(graph, kind):
    """Network left after applying a strategy to a source patch.

    ``dhex-separate`` returns a tuple of two single-bond graphs.
    """
    kind = TransformKind(kind)
    if graph.kind is not SOURCE_KIND[kind]:
        raise ValueError(f"{kind.value} needs a {SOURCE_KIND[kind].value} patch, got {graph.kind.value}")
    if kind is TransformKind.DOUBLE_HEX_TO_TRIANGLE:
        return _to_triangle(graph)
    if kind is TransformKind.THIRD_DOUBLE_HEX_TO_SQUARE:
        return _to_square(graph)
    if kind is TransformKind.DOUBLE_HEX_SEPARATE:
        single = _single_copy(graph)
        return single, single
    if kind is TransformKind.THIRD_DOUBLE_HEX_SEPARATE:
        return graph
    return merge_double_bonds(graph)


@dataclass(frozen=True)
class TransformedEqc:
    value: float
    std_error: float
    trials: int
    normalizer: int


def transformed_eqc(source_graph, kind, scenario, p, trials=DEFAULT_TRIALS,
                    master_seed=DEFAULT_SEED, threads=1, target=None):
    """EQC of a strategy, normalized by the source lattice's resources.

    ``target`` may pass a precomputed :func:`transform_graph` result.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    seed = check_seed(master_seed)
    target = transform_graph(source_graph, kind) if target is None else target
    copies = target if isinstance(target, tuple) else (target,)
    counts = None
    n1 = None
    for c, g in enumerate(copies):
        term = place_terminals(g, scenario)
        n1 = len(term.sources) * source_graph.coordination
        stream = seed if len(copies) == 1 else derive_seed(seed, c)
        part = run_trials(g, copy_probabilities(g, p), stream, trials, term.sources, term.sinks, threads)
        counts = part if counts is None else counts + part
    est = summarize(counts, n1)
    return TransformedEqc(est.mean, est.std_error, est.trials, n1)


@dataclass(frozen=True)
class ScanRow:
    p: float
    eqc_original: float
    eqc_transformed: float
    diff: float
    diff_stderr: float


@dataclass(frozen=True)
class ScanResult:
    original: TransformKind
    transformed: TransformKind
    rows: list
    crossings: list


def sign_changes(ps, diffs):
    """Grid intervals ``(p_lo, p_hi)`` across which ``diffs`` changes sign."""
    out = []
    last = None
    for p, d in zip(ps, diffs):
        s = np.sign(d)
        if s == 0:
            continue
        if last is not None and s != last[1]:
            out.append((last[0], p))
        last = (p, s)
    return out


def crossover_scan(original, transformed, p_grid, trials=DEFAULT_TRIALS, master_seed=DEFAULT_SEED,
                   extent=DEFAULT_EXTENT, scenario=None, threads=1):
    """Paired EQC curves of two strategies on a common source lattice.

    Both strategies share the per-point seed, so identical strategies give
    identical curves.
    """
    original, transformed = TransformKind(original), TransformKind(transformed)
    if SOURCE_KIND[original] is not SOURCE_KIND[transformed]:
        raise ValueError("strategies must share a source lattice")
    scenario = scenario or ScenarioSpec(Mode.POINT_TO_POINT, d=10)
    source = generate(SOURCE_KIND[original], extent)
    targets = {k: transform_graph(source, k) for k in {original, transformed}}
    rows = []
    for p in p_grid:
        seed = point_seed(master_seed, p, scenario.d)
        a = transformed_eqc(source, original, scenario, p, trials, seed, threads, targets[original])
        b = transformed_eqc(source, transformed, scenario, p, trials, seed, threads, targets[transformed])
        rows.append(ScanRow(float(p), a.value, b.value, b.value - a.value,
                            math.hypot(a.std_error, b.std_error)))
    crossings = sign_changes([r.p for r in rows], [r.diff for r in rows])
    return ScanResult(original, transformed, rows, crossings)


__all__ = [
    "TransformKind", "scp_forward", "scp_inverse", "joint_scp", "transform_graph",
    "merge_double_bonds", "transformed_eqc", "crossover_scan", "sign_changes",
    "ScanRow", "ScanResult", "TransformedEqc", "P_SWAP_FIXED",
]
