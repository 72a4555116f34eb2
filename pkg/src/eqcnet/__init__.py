"""Exclusive quantum channels (EQC) on entanglement-percolated lattices."""

from .analytic import INDICES, LatticeIndex, analytic_e0, fit_alpha, pairing_expectation
from .fitting import FitError, FitResult, fit_exponential, radius, relative_curve
from .flow import FlowProblem, flow_paths, max_channels, min_cut
from .lattice import EntangledBondSpec, LatticeGraph, LatticeKind, generate, joint_scp, node_at, scp_from_state
from .montecarlo import Mode, ScenarioSpec, estimate_eqc, estimate_theta, eqc_curve_vs_distance, eqc_curve_vs_p
from .percolation import PercolationParams, enumerate_all, sample
from .transform import TransformKind, crossover_scan, scp_forward, scp_inverse, transform_graph, transformed_eqc

__all__ = [
    "INDICES", "LatticeIndex", "analytic_e0", "fit_alpha", "pairing_expectation",
    "FitError", "FitResult", "fit_exponential", "radius", "relative_curve",
    "FlowProblem", "flow_paths", "max_channels", "min_cut",
    "EntangledBondSpec", "LatticeGraph", "LatticeKind", "generate", "joint_scp", "node_at", "scp_from_state",
    "Mode", "ScenarioSpec", "estimate_eqc", "estimate_theta", "eqc_curve_vs_distance", "eqc_curve_vs_p",
    "PercolationParams", "enumerate_all", "sample",
    "TransformKind", "crossover_scan", "scp_forward", "scp_inverse", "transform_graph", "transformed_eqc",
]
