"""Bond percolation realizations of a lattice network.

Each copy of each bond converts to a singlet independently with
probability ``p``.  Copy ``c`` of edge ``e`` in trial ``t`` is open iff
word ``c`` of the edge's counter-based draw (see :mod:`eqcnet.rng`) is
below ``p``.  Reusing the same uniforms for every ``p`` couples
realizations, so open sets grow monotonically with ``p``.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import joint_scp
from .rng import _M32, _S32, MAX_COPIES, check_seed, threefry2x32, to_unit, trial_key


@dataclass(frozen=True)
class PercolationParams:
    p: float
    master_seed: int = 42
    trial_index: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        check_seed(self.master_seed)
        if self.trial_index < 0:
            raise ValueError("trial_index must be nonnegative")


@dataclass(frozen=True)
class PercolationSample:
    open_capacity: np.ndarray

    def to_json(self):
        return json.dumps({str(e): int(c) for e, c in enumerate(self.open_capacity)})


@njit(inline="always")
def draw_copies(k0, k1, e, mult, p):
    """Open copies of edge ``e`` under trial key ``(k0, k1)``."""
    w0, w1 = threefry2x32(k0, k1, np.uint64(e) & _M32, np.uint64(e) >> _S32)
    c = 0
    if mult >= 1 and to_unit(w0) < p:
        c += 1
    if mult >= 2 and to_unit(w1) < p:
        c += 1
    return c


@njit(nogil=True, cache=True)
def fill_capacity(mult, p_edge, master_seed, trial_index, cap):
    """Open-copy count per edge for one trial."""
    k0, k1 = trial_key(master_seed, trial_index)
    for e in range(mult.shape[0]):
        cap[e] = draw_copies(k0, k1, e, mult[e], p_edge[e])


def copy_probabilities(graph, p, joint_p=None):
    """Per-edge conversion probability, honouring jointly converted bonds."""
    p_edge = np.full(graph.n_edges, float(p))
    if graph.joint is not None and graph.joint.any():
        if joint_p is None:
            joint_p = joint_scp(p)
        p_edge[graph.joint] = joint_p
    return p_edge


def sample(graph, params):
    """One reproducible realization of ``graph`` under ``params``."""
    if graph.mult.max(initial=0) > MAX_COPIES:
        raise ValueError(f"edge multiplicity above {MAX_COPIES} is not supported")
    cap = np.empty(graph.n_edges, dtype=np.int64)
    fill_capacity(
        graph.mult,
        copy_probabilities(graph, params.p),
        np.uint64(params.master_seed),
        np.uint64(params.trial_index),
        cap,
    )
    return PercolationSample(cap)


def enumerate_all(graph, p, max_copies=24):
    """Yield every open/closed assignment of bond copies with its probability.

    Brute-force oracle for small graphs: ``2**B`` configurations for ``B``
    bond copies.
    """
    B = graph.n_copies
    if B > max_copies:
        raise ValueError(f"{B} bond copies exceeds the enumeration cap {max_copies}")
    p_edge = copy_probabilities(graph, p)
    owner = np.repeat(np.arange(graph.n_edges), graph.mult)
    q = p_edge[owner]
    for bits in itertools.product((0, 1), repeat=B):
        bits = np.array(bits, dtype=np.int64)
        weight = float(np.prod(np.where(bits == 1, q, 1.0 - q)))
        cap = np.bincount(owner, weights=bits, minlength=graph.n_edges).astype(np.int64)
        yield PercolationSample(cap), weight
