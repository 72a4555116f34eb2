import math

import numpy as np
import pytest

from eqcnet.lattice import COORDINATION, LatticeKind, _pos_key, boundary_nodes, generate
from eqcnet.montecarlo import ScenarioSpec
from eqcnet.transform import (P_SWAP_FIXED, SOURCE_KIND, TransformKind, crossover_scan, scp_forward, scp_inverse,
                              sign_changes, transform_graph, transformed_eqc)

P2P = ScenarioSpec("p2p", d=6)


def _edge_keys(g):
    keys = [_pos_key(x, y) for x, y in g.pos]
    return keys, {frozenset((keys[u], keys[v])) for u, v in g.edges}


def _assert_native_patch(t, native_kind):
    """Every bond is a native bond; interior nodes keep all native neighbours."""
    native = generate(native_kind, 2 * t.extent + 2)
    keys, edges = _edge_keys(t)
    nkeys, nedges = _edge_keys(native)
    assert set(keys) <= set(nkeys)
    assert edges <= nedges
    rim = boundary_nodes(t)
    kept = set(keys)
    for v in range(t.n_nodes):
        if v in rim:
            continue
        around = {e for e in nedges if keys[v] in e}
        assert {e for e in around if e <= kept} == around
    assert (t.mult == 1).all()


def test_double_hex_to_triangle():
    src = generate("hexagon-double", 5)
    t = transform_graph(src, "dhex2tri")
    assert t.kind is LatticeKind.TRIANGLE
    assert t.n_nodes * 2 == src.n_nodes
    interior = [v for v in range(t.n_nodes) if v not in boundary_nodes(t)]
    assert (t.degree[interior] == 6).all()
    _assert_native_patch(t, "triangle")
    assert np.allclose(t.pos[t.origin], 0.0)


def test_third_double_hex_to_square():
    src = generate("hexagon-third-double", 5)
    t = transform_graph(src, "tdhex2sq")
    assert t.kind is LatticeKind.SQUARE
    assert t.n_nodes * 2 == src.n_nodes
    assert t.n_edges == int((src.mult == 1).sum())
    interior = [v for v in range(t.n_nodes) if v not in boundary_nodes(t)]
    assert (t.degree[interior] == 4).all()
    _assert_native_patch(t, "square")


def test_separate_copies():
    src = generate("hexagon-double", 3)
    a, b = transform_graph(src, "dhex-separate")
    for g in (a, b):
        assert g.kind is LatticeKind.HEXAGON and (g.mult == 1).all()
        interior = [v for v in range(g.n_nodes) if v not in boundary_nodes(g)]
        assert (g.degree[interior] == 3).all()


def test_joint_variants_mark_double_bonds():
    src = generate("hexagon-third-double", 3)
    g = transform_graph(src, "tdhex-joint")
    assert np.array_equal(g.joint, src.mult == 2)
    assert (g.mult == 1).all() and g.coordination == 3
    assert transform_graph(src, "tdhex-separate") is src


def test_kind_mismatch():
    with pytest.raises(ValueError):
        transform_graph(generate("square", 3), "dhex2tri")
    with pytest.raises(ValueError):
        transform_graph(generate("hexagon-double", 3), "tdhex2sq")
    with pytest.raises(ValueError):
        transform_graph(generate("hexagon-double", 3), "nope")


def test_scp_mapping():
    assert scp_forward(P_SWAP_FIXED) == pytest.approx(1.0, abs=1e-15)
    assert scp_forward(0.0) == 0.0
    assert scp_inverse(1.0) == pytest.approx(2 - math.sqrt(2), abs=1e-15)
    for p in np.linspace(0, P_SWAP_FIXED, 101):
        assert abs(scp_inverse(scp_forward(p)) - p) < 1e-12
    with pytest.raises(ValueError):
        scp_forward(1.0)
    with pytest.raises(ValueError):
        scp_inverse(1.2)


@pytest.mark.parametrize("kind, p, expected", [
    ("dhex2tri", 1.0, 1.0),
    ("dhex-separate", 1.0, 1.0),
    ("tdhex2sq", 1.0, 1.0),
    ("tdhex-separate", 1.0, 1.0),
    ("dhex-joint", P_SWAP_FIXED, 0.5),
    ("dhex-joint", 0.9, 0.5),
    ("tdhex-joint", 1.0, 0.75),
])
def test_source_normalizer(kind, p, expected):
    src = generate(SOURCE_KIND[TransformKind(kind)], 12)
    res = transformed_eqc(src, kind, P2P, p, trials=50)
    assert res.value == pytest.approx(expected, abs=1e-15)
    assert res.normalizer == COORDINATION[src.kind]


def test_swapping_rescues_subcritical_copies():
    src = generate("hexagon-double", 16)
    sep = transformed_eqc(src, "dhex-separate", P2P, 0.45, trials=2000)
    tri = transformed_eqc(src, "dhex2tri", P2P, 0.45, trials=2000)
    assert sep.value < 0.01
    assert tri.value > 0.05


def test_triangle_and_separate_agree_near_one():
    src = generate("hexagon-double", 16)
    sep = transformed_eqc(src, "dhex-separate", P2P, 0.97, trials=2000)
    tri = transformed_eqc(src, "dhex2tri", P2P, 0.97, trials=2000)
    assert abs(sep.value - tri.value) < 0.05


def test_square_beats_third_double_strategies():
    src = generate("hexagon-third-double", 16)
    sq = transformed_eqc(src, "tdhex2sq", P2P, 0.8, trials=3000)
    for other in ("tdhex-joint", "tdhex-separate"):
        o = transformed_eqc(src, other, P2P, 0.8, trials=3000)
        assert sq.value - o.value > 3 * math.hypot(sq.std_error, o.std_error)


def test_identical_strategies_scan_to_zero():
    res = crossover_scan("dhex2tri", "dhex2tri", [0.5, 0.7], trials=300, extent=12, scenario=P2P)
    assert all(r.diff == 0.0 and r.eqc_original == r.eqc_transformed for r in res.rows)
    assert res.crossings == []


def test_scan_requires_common_source():
    with pytest.raises(ValueError):
        crossover_scan("dhex2tri", "tdhex2sq", [0.5], trials=10)


def test_sign_changes():
    assert sign_changes([0.5, 0.55, 0.6, 0.65], [-1, -0.5, 0.2, 0.3]) == [(0.55, 0.6)]
    assert sign_changes([1, 2, 3, 4], [-1, 0, 1, -1]) == [(1, 3), (3, 4)]
    assert sign_changes([1, 2], [1, 1]) == []
