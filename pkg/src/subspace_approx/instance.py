"""Instance model for Subspace(k,p): the point matrix with optional row and
column measures, objective evaluation for both the true problem and its
convex relaxation, measure normalization, and JSON file I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class InstanceFormatError(ValueError):
    """Malformed instance file (missing/ill-typed field)."""


class InstanceValidationError(ValueError):
    """Structurally valid but semantically inconsistent instance."""


@dataclass(frozen=True)
class ProblemSpec:
    """Target subspace dimension k and norm exponent p.

    k must satisfy 0 <= k <= n-1 for the point set it is used with; k = n
    is rejected (the problem is trivially zero there and none of the
    algorithms handle it).
    """

    k: int
    p: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise InstanceValidationError(f"k must be a non-negative integer, got {self.k}")
        if not np.isfinite(self.p) or self.p < 1:
            raise InstanceValidationError(f"p must be a finite real >= 1, got {self.p}")

    def validate_against(self, n):
        if self.k > n - 1:
            raise InstanceValidationError(
                f"k={self.k} must be at most n-1={n - 1} (k=n is trivial and rejected)")


@dataclass(frozen=True)
class PointSet:
    """m points in R^n as rows, with optional positive row/column weights."""

    rows: np.ndarray
    row_weights: np.ndarray | None = None
    col_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InstanceValidationError(f"rows must be a non-empty m x n matrix, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InstanceValidationError("rows contain non-finite entries")
        for name, w, length in (("row_weights", self.row_weights, rows.shape[0]),
                                ("col_weights", self.col_weights, rows.shape[1])):
            if w is not None:
                w = np.asarray(w, dtype=float)
                object.__setattr__(self, name, w)
                if w.shape != (length,):
                    raise InstanceValidationError(f"{name} must have length {length}, got shape {w.shape}")
                if not np.all(np.isfinite(w)) or np.any(w <= 0):
                    raise InstanceValidationError(f"{name} must be strictly positive and finite")

    @property
    def m(self):
        return self.rows.shape[0]

    @property
    def n(self):
        return self.rows.shape[1]

    def mu(self):
        return np.ones(self.m) if self.row_weights is None else self.row_weights

    def nu(self):
        return np.ones(self.n) if self.col_weights is None else self.col_weights


def _check_orthonormal(Z, tol=1e-6):
    G = Z.T @ Z
    err = np.abs(G - np.eye(Z.shape[1]))
    if err.max() > tol:
        j1, j2 = np.unravel_index(np.argmax(err), err.shape)
        raise InstanceValidationError(
            f"Z columns not orthonormal: |<Z[{j1}],Z[{j2}]> - delta| = {err[j1, j2]:.3e} > {tol:g}")


def subspace_cost(ps: PointSet, spec: ProblemSpec, Z) -> float:
    """ (sum_i mu(i) * ||a_i^T Z||_2^p)^(1/p) for a column-orthonormal Z."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    spec.validate_against(ps.n)
    if Z.shape != (ps.n, ps.n - spec.k):
        raise InstanceValidationError(
            f"Z must be {ps.n} x {ps.n - spec.k}, got {Z.shape}")
    _check_orthonormal(Z)
    dists = np.linalg.norm(ps.rows @ Z, axis=1)
    return float(np.dot(ps.mu(), dists ** spec.p) ** (1.0 / spec.p))


def relaxation_cost(ps: PointSet, spec: ProblemSpec, X) -> float:
    """ (sum_i mu(i) * (a_i^T X a_i)^(p/2))^(1/p), negative forms clamped at 0."""
    X = np.asarray(X, dtype=float)
    if X.shape != (ps.n, ps.n):
        raise InstanceValidationError(f"X must be {ps.n} x {ps.n}, got {X.shape}")
    q = np.einsum("ij,jk,ik->i", ps.rows, X, ps.rows)
    q = np.clip(q, 0.0, None)
    return float(np.dot(ps.mu(), q ** (spec.p / 2.0)) ** (1.0 / spec.p))


def normalize_measures(ps: PointSet, spec: ProblemSpec) -> PointSet:
    """Equivalent counting-measure instance.

    Entry (i,j) becomes A_ij * mu(i)^(1/p) / sqrt(nu(j)); solutions transfer
    through the change of variable z~_j = sqrt(nu(j)) * z_j with identical
    objective values.
    """
    rows = ps.rows * ps.mu()[:, None] ** (1.0 / spec.p) / np.sqrt(ps.nu())[None, :]
    return PointSet(rows=rows, meta=dict(ps.meta))


def save_instance(ps: PointSet, spec: ProblemSpec, path):
    doc = {
        "m": ps.m,
        "n": ps.n,
        "k": spec.k,
        "p": spec.p,
        "rows": [[float(v) for v in row] for row in ps.rows],
    }
    if ps.row_weights is not None:
        doc["row_weights"] = [float(v) for v in ps.row_weights]
    if ps.col_weights is not None:
        doc["col_weights"] = [float(v) for v in ps.col_weights]
    if ps.meta:
        doc["meta"] = ps.meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_instance(path):
    """Load (PointSet, ProblemSpec) from the JSON instance format."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{path}: top-level value must be an object")
    for field_name in ("m", "n", "k", "p", "rows"):
        if field_name not in doc:
            raise InstanceFormatError(f"{path}: missing required field '{field_name}'")
    m, n = doc["m"], doc["n"]
    if not (isinstance(m, int) and isinstance(n, int)):
        raise InstanceFormatError(f"{path}: 'm' and 'n' must be integers")
    if m < 1:
        raise InstanceValidationError(f"{path}: empty instance (m={m})")
    rows = doc["rows"]
    if len(rows) != m or any(len(r) != n for r in rows):
        raise InstanceValidationError(f"{path}: 'rows' shape inconsistent with m={m}, n={n}")
    ps = PointSet(
        rows=np.array(rows, dtype=float),
        row_weights=np.array(doc["row_weights"], dtype=float) if "row_weights" in doc else None,
        col_weights=np.array(doc["col_weights"], dtype=float) if "col_weights" in doc else None,
        meta=doc.get("meta", {}),
    )
    spec = ProblemSpec(k=doc["k"], p=float(doc["p"]))
    spec.validate_against(n)
    return ps, spec


@dataclass(frozen=True)
class SubspaceSolution:
    """An n x (n-k) column-orthonormal complement basis with its lp cost."""

    Z: np.ndarray
    value: float
    run_index: int | None = None
