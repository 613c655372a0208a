import numpy as np
import pytest

from subspace_approx.instance import (
    InstanceFormatError,
    InstanceValidationError,
    PointSet,
    ProblemSpec,
    load_instance,
    normalize_measures,
    relaxation_cost,
    save_instance,
    subspace_cost,
)


def test_problemspec_validation():
    with pytest.raises(InstanceValidationError):
        ProblemSpec(k=-1, p=2.0)
    with pytest.raises(InstanceValidationError):
        ProblemSpec(k=1, p=0.5)
    spec = ProblemSpec(k=3, p=2.0)
    with pytest.raises(InstanceValidationError):
        spec.validate_against(3)  # k = n is rejected
    spec.validate_against(4)


def test_pointset_validation():
    with pytest.raises(InstanceValidationError):
        PointSet(rows=np.array([[1.0, np.nan]]))
    with pytest.raises(InstanceValidationError):
        PointSet(rows=np.eye(2), row_weights=np.array([1.0, -1.0]))
    with pytest.raises(InstanceValidationError):
        PointSet(rows=np.eye(2), col_weights=np.array([1.0]))
    ps = PointSet(rows=[1.0, 2.0])  # 1-d input becomes a single row
    assert (ps.m, ps.n) == (1, 2)


def test_subspace_cost_axis_aligned():
    ps = PointSet(rows=np.array([[3.0, 0.0], [0.0, 4.0]]))
    spec = ProblemSpec(k=1, p=2.0)
    Z = np.array([[0.0], [1.0]])
    # distance of (3,0) to span(e1) is 0; of (0,4) is 4
    assert subspace_cost(ps, spec, Z) == pytest.approx(4.0)


def test_subspace_cost_rejects_non_orthonormal():
    ps = PointSet(rows=np.eye(3))
    spec = ProblemSpec(k=1, p=2.0)
    Z = np.ones((3, 2))
    with pytest.raises(InstanceValidationError, match="orthonormal"):
        subspace_cost(ps, spec, Z)


def test_relaxation_matches_subspace_on_projectors():
    rng = np.random.default_rng(1)
    for _ in range(10):
        m, n, k = 7, 5, 2
        p = float(rng.choice([2.0, 3.0, 4.0]))
        ps = PointSet(rows=rng.standard_normal((m, n)))
        spec = ProblemSpec(k=k, p=p)
        Q, _ = np.linalg.qr(rng.standard_normal((n, n - k)))
        assert relaxation_cost(ps, spec, Q @ Q.T) == pytest.approx(
            subspace_cost(ps, spec, Q), rel=1e-12)


def test_normalize_measures_preserves_cost():
    rng = np.random.default_rng(2)
    m, n, k, p = 6, 4, 1, 3.0
    ps = PointSet(rows=rng.standard_normal((m, n)),
                  row_weights=rng.uniform(0.5, 2.0, m),
                  col_weights=rng.uniform(0.5, 2.0, n))
    spec = ProblemSpec(k=k, p=p)
    norm = normalize_measures(ps, spec)
    assert norm.row_weights is None and norm.col_weights is None
    # the change of variable X~ = diag(sqrt(nu)) X diag(sqrt(nu)) preserves
    # the objective; checked on the relaxation where the map is linear
    Z, _ = np.linalg.qr(rng.standard_normal((n, n - k)))
    X = Z @ Z.T
    Xt = np.sqrt(ps.nu())[:, None] * X * np.sqrt(ps.nu())[None, :]
    assert relaxation_cost(norm, spec, Xt) == pytest.approx(
        relaxation_cost(ps, spec, X), rel=1e-12)


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    ps = PointSet(rows=rng.standard_normal((4, 3)),
                  row_weights=rng.uniform(0.5, 2.0, 4),
                  meta={"generator": "test"})
    spec = ProblemSpec(k=1, p=4.0)
    path = tmp_path / "inst.json"
    save_instance(ps, spec, path)
    ps2, spec2 = load_instance(path)
    assert np.allclose(ps2.rows, ps.rows)
    assert np.allclose(ps2.row_weights, ps.row_weights)
    assert ps2.col_weights is None
    assert ps2.meta == {"generator": "test"}
    assert (spec2.k, spec2.p) == (1, 4.0)


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InstanceFormatError, match="invalid JSON"):
        load_instance(bad)
    missing = tmp_path / "missing.json"
    missing.write_text('{"m": 1, "n": 2, "k": 0, "p": 2}')
    with pytest.raises(InstanceFormatError, match="'rows'"):
        load_instance(missing)
    shape = tmp_path / "shape.json"
    shape.write_text('{"m": 2, "n": 2, "k": 0, "p": 2, "rows": [[1, 0]]}')
    with pytest.raises(InstanceValidationError, match="inconsistent"):
        load_instance(shape)
