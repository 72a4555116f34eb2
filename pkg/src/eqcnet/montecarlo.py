"""Monte Carlo estimation of exclusive quantum channels (EQC).

EQC is the mean channel count over percolation trials divided by the
channel count at ``p = 1`` (``N1``).  Trials are keyed by index, so results
do not depend on how trials are split across worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .flow import trial_clusters, trial_flows
from .lattice import boundary_nodes, node_at
from .percolation import copy_probabilities
from .rng import check_seed, derive_seed

DEFAULT_EXTENT = 40
DEFAULT_TRIALS = 20_000
DEFAULT_SEED = 42
RIM_GUARD = 2


class Mode(str, Enum):
    POINT_TO_POINT = "p2p"
    TO_INFINITY = "inf"
    K_TO_K = "ktok"
    ONE_TO_K = "1tok"


@dataclass(frozen=True)
class ScenarioSpec:
    """Which channels are counted.

    ``d`` is the distance between the parties along the first lattice axis;
    multi-node parties are spread ``separation`` apart along the second axis.
    """

    mode: Mode
    d: int = 10
    k: int = 1
    separation: int = 6

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.d < 1:
            raise ValueError(f"distance must be >= 1, got {self.d}")
        if self.k < 1:
            raise ValueError(f"party size must be >= 1, got {self.k}")


@dataclass(frozen=True)
class EqcEstimate:
    mean: float
    std_error: float
    trials: int
    normalizer: int
    raw_mean_channels: float


@dataclass(frozen=True)
class ClusterStats:
    theta_p: float
    std_error: float
    trials: int


@dataclass(frozen=True)
class Terminals:
    sources: frozenset
    sinks: frozenset
    normalizer: int


def _party(graph, x, k, separation):
    offsets = [separation * i - (separation * (k - 1)) // 2 for i in range(k)]
    return [node_at(graph, (x, b)) for b in offsets]


def place_terminals(graph, scenario):
    """Source and sink nodes for a scenario, plus the ``p = 1`` channel count.

    The normalizer is the total incident multiplicity of the smaller party
    (both senders together for the to-infinity case).
    """
    d = scenario.d
    left, right = -(d // 2), d - d // 2
    k, sep = scenario.k, scenario.separation
    mode = scenario.mode
    if mode is Mode.POINT_TO_POINT:
        sources, sinks = _party(graph, left, 1, sep), _party(graph, right, 1, sep)
    elif mode is Mode.TO_INFINITY:
        sources, sinks = [node_at(graph, (left, 0)), node_at(graph, (right, 0))], None
    elif mode is Mode.K_TO_K:
        sources, sinks = _party(graph, left, k, sep), _party(graph, right, k, sep)
    else:
        sources, sinks = _party(graph, left, 1, sep), _party(graph, right, k, sep)

    terminals = sources + (sinks or [])
    if len(set(terminals)) != len(terminals):
        raise ValueError("scenario places two terminals on the same node")
    near_rim = [t for t in terminals if graph.rim_distance[t] < RIM_GUARD]
    if near_rim:
        raise ValueError(
            f"terminals {near_rim} lie within {RIM_GUARD} spacings of the patch rim; "
            "use a larger extent"
        )
    deg = graph.degree
    if sinks is None:
        return Terminals(frozenset(sources), frozenset(boundary_nodes(graph)), int(deg[sources].sum()))
    n1 = min(int(deg[sources].sum()), int(deg[sinks].sum()))
    return Terminals(frozenset(sources), frozenset(sinks), n1)


def _check_p(p):
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p}")


def run_trials(graph, p_edge, seed, trials, sources, sinks, threads=1):
    """Per-trial channel counts, indexed by trial."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    threads = max(1, min(int(threads), trials))
    if threads == 1:
        return trial_flows(graph, p_edge, seed, 0, trials, sources, sinks)
    bounds = np.linspace(0, trials, threads + 1).astype(int)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(
            lambda ab: trial_flows(graph, p_edge, seed, ab[0], ab[1] - ab[0], sources, sinks),
            zip(bounds[:-1], bounds[1:]),
        )
        return np.concatenate(list(parts))


def summarize(counts, normalizer):
    trials = len(counts)
    raw = int(counts.sum()) / trials
    if trials > 1:
        sd = float(np.std(counts / normalizer, ddof=1))
    else:
        sd = 0.0
    return EqcEstimate(
        mean=raw / normalizer,
        std_error=sd / math.sqrt(trials),
        trials=trials,
        normalizer=int(normalizer),
        raw_mean_channels=raw,
    )


def estimate_eqc(graph, scenario, p, trials=DEFAULT_TRIALS, master_seed=DEFAULT_SEED,
                 threads=1, normalizer=None):
    """EQC of one (lattice, p, scenario) tuple.

    ``normalizer`` overrides ``N1``, as needed when channels are counted on a
    transformed network but resources are those of the original one.
    """
    _check_p(p)
    seed = check_seed(master_seed)
    term = place_terminals(graph, scenario)
    counts = run_trials(graph, copy_probabilities(graph, p), seed, trials,
                        term.sources, term.sinks, threads)
    return summarize(counts, normalizer or term.normalizer)


def point_seed(master_seed, p, d):
    """Independent stream for one ``(p, d)`` grid point."""
    return derive_seed(master_seed, round(float(p) * 1_000_000), int(d))


def eqc_curve_vs_distance(graph, mode, p, d_values, trials=DEFAULT_TRIALS,
                          master_seed=DEFAULT_SEED, k=1, separation=6, threads=1):
    curve = []
    for d in d_values:
        scenario = ScenarioSpec(mode, d=int(d), k=k, separation=separation)
        curve.append((int(d), estimate_eqc(graph, scenario, p, trials,
                                           point_seed(master_seed, p, d), threads)))
    return curve


def eqc_curve_vs_p(graph, scenario, p_values, trials=DEFAULT_TRIALS,
                   master_seed=DEFAULT_SEED, threads=1):
    return [
        (float(p), estimate_eqc(graph, scenario, p, trials, point_seed(master_seed, p, scenario.d), threads))
        for p in p_values
    ]


def estimate_theta(graph, p, trials=DEFAULT_TRIALS, master_seed=DEFAULT_SEED, threads=1):
    """Mean fraction of nodes in the largest open cluster."""
    _check_p(p)
    seed = check_seed(master_seed)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_edge = copy_probabilities(graph, p)
    threads = max(1, min(int(threads), trials))
    bounds = np.linspace(0, trials, threads + 1).astype(int)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(lambda ab: trial_clusters(graph, p_edge, seed, ab[0], ab[1] - ab[0]),
                         zip(bounds[:-1], bounds[1:]))
        sizes = np.concatenate(list(parts))
    frac = sizes / graph.n_nodes
    se = float(np.std(frac, ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    return ClusterStats(theta_p=int(sizes.sum()) / (trials * graph.n_nodes), std_error=se, trials=trials)
