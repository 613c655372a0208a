"""Dense symmetric eigendecomposition and exact Euclidean projection onto the
spectral feasible set {0 <= X <= I, Tr(X) >= s}.

The feasible set is unitarily invariant, so the Frobenius-nearest feasible
point is obtained by projecting the eigenvalues onto the capped simplex
{lam in [0,1]^r : sum(lam) >= s} and reassembling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EigenConvergenceError(RuntimeError):
    """The eigen iteration failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class InfeasibleTargetError(ValueError):
    """Requested trace target exceeds what the box [0,1]^r can hold."""


@dataclass(frozen=True)
class EigenSpectrum:
    """Full spectrum of a symmetric matrix, eigenvalues descending."""

    values: np.ndarray  # shape (r,), non-increasing
    vectors: np.ndarray  # shape (n, r), orthonormal columns

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def symmetrize(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return (M + M.T) / 2.0


def sym_eigen(M) -> EigenSpectrum:
    """Eigendecompose a symmetric matrix; eigenvalues sorted non-increasing.

    Output is deterministic for identical input bits: within degenerate
    eigenspaces LAPACK's basis is used as-is, with a fixed sign convention
    (largest-magnitude entry of each eigenvector made positive).
    """
    M = symmetrize(M)
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigendecomposition did not converge: {exc}",
                                    iterations=30 * M.shape[0]) from exc
    w = w[::-1].copy()
    V = V[:, ::-1].copy()
    # fixed sign convention for determinism
    for j in range(V.shape[1]):
        col = V[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            V[:, j] = -col
    return EigenSpectrum(values=w, vectors=V)


def project_capped_simplex(mu, s):
    """Euclidean projection of mu onto {lam in [0,1]^r : sum(lam) >= s}.

    Clamps to the box first; if the clamped sum already meets the target the
    clamp is the projection. Otherwise finds theta >= 0 by bisection such
    that sum(clip(mu + theta, 0, 1)) == s (the sum is continuous, monotone
    and piecewise linear in theta).
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1:
        raise ValueError("mu must be a 1-d vector")
    if np.any(np.isnan(mu)):
        raise ValueError("mu contains NaN")
    r = mu.size
    if not 0 <= s <= r:
        raise InfeasibleTargetError(f"target s={s} outside [0, {r}]")
    clamped = np.clip(mu, 0.0, 1.0)
    if clamped.sum() >= s:
        return clamped
    lo = 0.0
    hi = 1.0 - min(mu.min(), 0.0)  # at theta=hi every coordinate clamps to 1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        total = np.clip(mu + mid, 0.0, 1.0).sum()
        if abs(total - s) <= 1e-12:
            lo = hi = mid
            break
        if total < s:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return np.clip(mu + theta, 0.0, 1.0)


def project_feasible(X, s):
    """Frobenius-nearest matrix to X in {0 <= Y <= I, Tr(Y) >= s}."""
    spec = sym_eigen(X)
    lam = project_capped_simplex(spec.values, s)
    out = (spec.vectors * lam) @ spec.vectors.T
    return (out + out.T) / 2.0
