import math

import numpy as np
import pytest

from subspace_approx.generators import (
    Graph,
    UlcInstance,
    gap_net_parameters,
    gaussian_gap_instance,
    load_graph,
    load_ulc,
    min_uncut_exhaustive,
    minuncut_reduce,
    save_graph,
    save_ulc,
    ulc_indicator_vector,
    ulc_parameters,
    ulc_reduce,
    ulc_uniform_vector,
)
from subspace_approx.instance import (
    InstanceValidationError,
    relaxation_cost,
    subspace_cost,
)
from subspace_approx.moments import gamma_p

TRIANGLE = Graph(n=3, edges=((0, 1), (1, 2), (0, 2)))
PATH3 = Graph(n=3, edges=((0, 1), (1, 2)))


def test_graph_validation():
    with pytest.raises(InstanceValidationError, match="self-loop"):
        Graph(n=2, edges=((0, 0),))
    with pytest.raises(InstanceValidationError, match="duplicate"):
        Graph(n=3, edges=((0, 1), (1, 0)))
    with pytest.raises(InstanceValidationError, match="out of range"):
        Graph(n=2, edges=((0, 2),))


def test_graph_roundtrip(tmp_path):
    path = tmp_path / "g.json"
    save_graph(TRIANGLE, path)
    g = load_graph(path)
    assert g.n == 3 and g.edges == TRIANGLE.edges


def test_gaussian_gap_deterministic():
    ps1, spec1 = gaussian_gap_instance(n=5, m=20, p=4.0, seed=42)
    ps2, _ = gaussian_gap_instance(n=5, m=20, p=4.0, seed=42)
    ps3, _ = gaussian_gap_instance(n=5, m=20, p=4.0, seed=43)
    assert np.array_equal(ps1.rows, ps2.rows)
    assert not np.array_equal(ps1.rows, ps3.rows)
    assert spec1.k == 4
    # scaling: rows are standard normals times m^(-1/p)
    assert np.std(ps1.rows) == pytest.approx(20 ** -0.25, rel=0.3)


def test_gap_net_parameters():
    net = gap_net_parameters(n=10, p=4.0, eta=0.1)
    assert net.epsilon == pytest.approx(0.1 ** 2 / 8)
    assert 0 < net.delta < 1
    assert net.m_min >= 5 / net.epsilon ** 2
    # the union-bound point count blows up immediately with n
    assert gap_net_parameters(n=200, p=4.0, eta=0.1).m_min == math.inf
    with pytest.raises(ValueError):
        gap_net_parameters(n=10, p=4.0, eta=1.5)


def test_minuncut_triangle_structure():
    ps, spec, thresholds = minuncut_reduce(TRIANGLE, p=3.0)
    assert ps.rows.shape == (6, 3)
    assert spec.k == 2 and spec.p == 3.0
    # N = floor(2^7 * 9 * 3 * 16) + 1
    assert thresholds["N"] == 55297
    assert len(thresholds["yes_values_p"]) == 4
    with pytest.raises(ValueError, match="p > 2"):
        minuncut_reduce(TRIANGLE, p=2.0)


def test_minuncut_cut_vector_hits_yes_value():
    for g in (TRIANGLE, PATH3):
        t, x = min_uncut_exhaustive(g)
        ps, spec, thresholds = minuncut_reduce(g, p=4.0)
        z = x / math.sqrt(g.n)
        cost = subspace_cost(ps, spec, z[:, None])
        assert cost ** spec.p == pytest.approx(thresholds["yes_values_p"][t], rel=1e-12)


def test_min_uncut_exhaustive_known_values():
    assert min_uncut_exhaustive(TRIANGLE)[0] == 1
    assert min_uncut_exhaustive(PATH3)[0] == 0
    k4 = Graph(n=4, edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
    assert min_uncut_exhaustive(k4)[0] == 2


def test_ulc_validation():
    with pytest.raises(InstanceValidationError, match="permutation"):
        UlcInstance(nv=1, nw=1, R=2, edges=((0, 0, (0, 0)),))
    with pytest.raises(InstanceValidationError, match="touch"):
        UlcInstance(nv=2, nw=1, R=1, edges=((0, 0, (0,)),))


def test_ulc_roundtrip(tmp_path):
    u = UlcInstance(nv=1, nw=1, R=2, edges=((0, 0, (1, 0)),))
    path = tmp_path / "u.json"
    save_ulc(u, path)
    u2 = load_ulc(path)
    assert u2.edges == u.edges and u2.R == 2


def test_ulc_parameters_schedule():
    params = ulc_parameters(1e-5, 4.0)
    assert params.tau == pytest.approx(1e-10 / 4)
    assert params.beta == pytest.approx(params.tau ** 2)
    assert params.B > 1 and math.isfinite(params.B)
    assert 0 < params.epsilon < params.eta
    with pytest.raises(ValueError, match="eta too large"):
        ulc_parameters(0.01, 4.0)
    with pytest.raises(ValueError, match="p > 2"):
        ulc_parameters(1e-5, 2.0)


def test_ulc_single_edge_dictator_value_one():
    # identity constraint, any R: a dictator solution has cost^p exactly 1
    for R in (1, 2, 3):
        u = UlcInstance(nv=1, nw=1, R=R, edges=((0, 0, tuple(range(R))),))
        ps, spec = ulc_reduce(u, p=4.0, B=10.0)
        assert ps.rows.shape == (2 ** (R + 1), R)
        for lab in range(R):
            z = ulc_indicator_vector(u, [lab])
            assert np.linalg.norm(z) == pytest.approx(1.0)
            cost = subspace_cost(ps, spec, z[:, None])
            assert cost ** 4 == pytest.approx(1.0, rel=1e-12)


def test_ulc_nonidentity_orientation():
    # pi_vw = (1,0): label 0 of v maps to label 1 of w; the satisfying
    # dictator labels w with 1 and still has cost^p = 1 (penalty rows vanish)
    u = UlcInstance(nv=1, nw=1, R=2, edges=((0, 0, (1, 0)),))
    ps, spec = ulc_reduce(u, p=4.0, B=100.0)
    z = ulc_indicator_vector(u, [1])
    assert subspace_cost(ps, spec, z[:, None]) ** 4 == pytest.approx(1.0, rel=1e-12)


def test_ulc_uniform_witness_below_gamma():
    u = UlcInstance(nv=1, nw=1, R=4, edges=((0, 0, (0, 1, 2, 3)),))
    ps, spec = ulc_reduce(u, p=4.0, B=50.0)
    z = ulc_uniform_vector(u)
    assert np.linalg.norm(z) == pytest.approx(1.0)
    cost_p = subspace_cost(ps, spec, z[:, None]) ** 4
    # E|sum x_i / sqrt(R)|^4 = 3 - 2/R
    assert cost_p == pytest.approx(3 - 2 / 4, rel=1e-12)
    assert cost_p <= gamma_p(4.0) ** 4


def test_ulc_relaxation_witness_feasible():
    u = UlcInstance(nv=2, nw=2, R=2,
                    edges=((0, 0, (0, 1)), (0, 1, (0, 1)),
                           (1, 0, (0, 1)), (1, 1, (0, 1))))
    ps, spec = ulc_reduce(u, p=4.0, B=5.0)
    d = u.nw * u.R
    assert ps.rows.shape == (4 * 2 ** 3, d)
    val = relaxation_cost(ps, spec, np.eye(d) / d)
    assert val > 0


def test_ulc_size_guard():
    u = UlcInstance(nv=1, nw=1, R=1, edges=((0, 0, (0,)),))
    with pytest.raises(ValueError, match="B must be positive"):
        ulc_reduce(u, p=4.0, B=0.0)
