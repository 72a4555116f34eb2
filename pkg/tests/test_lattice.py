import json
import math

import numpy as np
import pytest

from eqcnet.lattice import (COORDINATION, EntangledBondSpec, LatticeKind, axis_position, boundary_nodes,
                            generate, graph_from_dict, joint_scp, node_at, scp_from_state)

KINDS = list(LatticeKind)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("L", [2, 4])
def test_interior_multiplicity_equals_coordination(kind, L):
    g = generate(kind, L)
    rim = boundary_nodes(g)
    interior = [v for v in range(g.n_nodes) if v not in rim]
    assert interior
    assert (g.degree[interior] == COORDINATION[kind]).all()
    assert (g.degree <= COORDINATION[kind]).all()


@pytest.mark.parametrize("kind", KINDS)
def test_unit_bond_length_and_no_self_loops(kind):
    g = generate(kind, 3)
    u, v = g.edges[:, 0], g.edges[:, 1]
    assert (u < v).all()
    assert np.allclose(np.linalg.norm(g.pos[u] - g.pos[v], axis=1), 1.0)
    assert len({tuple(e) for e in g.edges.tolist()}) == g.n_edges


def test_square_one():
    g = generate("square", 1)
    assert g.n_nodes == 9 and g.n_edges == 12
    assert (g.mult == 1).all()
    assert len(boundary_nodes(g)) == 8
    assert g.origin not in boundary_nodes(g)


def test_square_two_origin_interior():
    g = generate("square", 2)
    assert g.origin not in boundary_nodes(g)
    assert np.allclose(g.pos[g.origin], 0.0)


def test_double_hexagon_all_double():
    g = generate("hexagon-double", 2)
    assert (g.mult == 2).all()


def test_third_double_fraction():
    g = generate("hexagon-third-double", 5)
    # one of the three bond classes is doubled
    vertical = np.isclose(g.pos[g.edges[:, 0], 0], g.pos[g.edges[:, 1], 0])
    assert (g.mult[vertical] == 2).all() and (g.mult[~vertical] == 1).all()
    assert abs(vertical.mean() - 1 / 3) < 0.05


def test_third_double_contracts_to_square_degrees():
    g = generate("hexagon-third-double", 4)
    parent = list(range(g.n_nodes))
    for (u, v), m in zip(g.edges, g.mult):
        if m == 2:
            parent[v] = int(u)
    merged = {}
    for (u, v), m in zip(g.edges, g.mult):
        if m == 1:
            for x in (parent[u], parent[v]):
                merged[x] = merged.get(x, 0) + 1
    degrees = np.bincount(list(merged.values()))
    assert degrees.argmax() == 4


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_generate_rejects_bad_extent(bad):
    with pytest.raises(ValueError):
        generate("square", bad)


def test_generate_deterministic_serialization():
    a = generate("triangle", 3).to_json()
    b = generate("triangle", 3).to_json()
    assert a == b
    doc = json.loads(a)
    assert set(doc) == {"kind", "extent", "nodes", "edges"}
    assert [n["id"] for n in doc["nodes"]] == list(range(len(doc["nodes"])))


@pytest.mark.parametrize("kind", KINDS)
def test_json_round_trip(kind):
    g = generate(kind, 2)
    h = graph_from_dict(json.loads(g.to_json()))
    assert np.array_equal(g.edges, h.edges)
    assert np.array_equal(g.mult, h.mult)
    assert np.allclose(g.pos, h.pos)


def test_node_ids_row_major():
    g = generate("square", 2)
    keys = [(y, x) for x, y in g.pos]
    assert keys == sorted(keys)


def test_node_at_origin_and_axis():
    for kind in KINDS:
        g = generate(kind, 3)
        assert node_at(g, (0, 0)) == g.origin
    sq = generate("square", 4)
    assert math.isclose(np.linalg.norm(sq.pos[node_at(sq, (3, 0))]), 3.0)


def test_hexagon_axis_neighbours():
    g = generate("hexagon", 4)
    a0, a1, a2 = (node_at(g, (a, 0)) for a in range(3))
    nbrs = {int(v) for e in g.edges if g.origin in e for v in e} - {g.origin}
    assert a1 in nbrs
    # armchair axis: node spacings alternate 1 and 2
    assert math.isclose(np.linalg.norm(g.pos[a1] - g.pos[a0]), 1.0)
    assert math.isclose(np.linalg.norm(g.pos[a2] - g.pos[a1]), 2.0)


def test_node_at_outside_patch():
    with pytest.raises(ValueError):
        node_at(generate("square", 2), (3, 0))


def test_axis_position_triangle():
    x, y = axis_position("triangle", (1, 1))
    assert math.isclose(x, 1.5) and math.isclose(y, math.sqrt(3) / 2)


def test_graph_read_only():
    g = generate("square", 1)
    with pytest.raises(ValueError):
        g.edges[0, 0] = 5


@pytest.mark.parametrize("lam, p", [(0.5, 1.0), (1.0, 0.0), (0.7, 0.6)])
def test_scp_from_state(lam, p):
    assert math.isclose(scp_from_state(EntangledBondSpec(lam)), p, abs_tol=1e-15)


@pytest.mark.parametrize("lam", [0.49, 1.01, float("nan")])
def test_scp_rejects_bad_lambda(lam):
    with pytest.raises(ValueError):
        EntangledBondSpec(lam)


def test_lambda2():
    s = EntangledBondSpec(0.8)
    assert math.isclose(s.lambda1 + s.lambda2, 1.0)


def test_joint_scp_matches_schmidt_coefficient():
    # two copies of sqrt(l1)|00> + sqrt(l2)|11>: the largest squared Schmidt coefficient is l1**2
    for lam in np.linspace(0.5, 1.0, 11):
        p = scp_from_state(lam)
        assert math.isclose(joint_scp(p), min(1.0, 2 * (1 - lam * lam)), abs_tol=1e-12)
