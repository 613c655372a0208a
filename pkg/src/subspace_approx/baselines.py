"""Reference solvers used as oracles.

svd_optimal is exact for p=2. sphere_oracle is a multi-start descent on the
unit sphere for the k=n-1 form min ||Az||_p, ||z||=1 -- a heuristic upper
bound on the true optimum, tight in practice at small n. grid_oracle does a
dense angular sweep for n in {2,3} and adds a Lipschitz bracket, giving the
only certified lower bounds in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import PointSet, ProblemSpec, normalize_measures
from .spectral import sym_eigen


@dataclass(frozen=True)
class SvdBaselineResult:
    singular_values: np.ndarray  # descending
    optimal_value: float
    top_k_subspace: np.ndarray  # n x k
    complement_Z: np.ndarray  # n x (n-k)


@dataclass(frozen=True)
class GridBracket:
    grid_min: float  # min cost over grid points (upper bound on optimum)
    lower_bound: float  # grid_min - L * cover_radius (certified lower bound)
    argmin_z: np.ndarray
    cover_radius: float
    lipschitz: float


def svd_optimal(ps: PointSet, k: int) -> SvdBaselineResult:
    """Exact optimum of Subspace(k,2) from the spectrum of A~^T A~."""
    spec = ProblemSpec(k=k, p=2.0)
    spec.validate_against(ps.n)
    A = normalize_measures(ps, spec).rows
    eig = sym_eigen(A.T @ A)
    lam = np.clip(eig.values, 0.0, None)
    sigma = np.sqrt(lam)
    value = float(np.sqrt(lam[k:].sum()))
    return SvdBaselineResult(
        singular_values=sigma,
        optimal_value=value,
        top_k_subspace=eig.vectors[:, :k],
        complement_Z=eig.vectors[:, k:],
    )


def _cost_p(A, z, p):
    # un-rooted cost sum |A z|^p for unit z (counting measure)
    return float(np.sum(np.abs(A @ z) ** p))


def _sphere_descent(A, p, z0, max_iters=300):
    """Tangent-space gradient descent with normalization retraction."""
    z = z0 / np.linalg.norm(z0)
    f = _cost_p(A, z, p)
    step = 1.0 / max(1.0, np.linalg.norm(A, ord="fro") ** 2)
    for _ in range(max_iters):
        r = A @ z
        g = p * (A.T @ (np.sign(r) * np.abs(r) ** (p - 1.0)))
        gt = g - np.dot(g, z) * z
        gn = np.linalg.norm(gt)
        if gn < 1e-14 * max(1.0, f):
            break
        improved = False
        trial = step * 2.0
        for _ in range(60):
            zc = z - trial * gt
            zc /= np.linalg.norm(zc)
            fc = _cost_p(A, zc, p)
            if fc < f - 1e-16 * max(1.0, f):
                z, f, step, improved = zc, fc, trial, True
                break
            trial *= 0.5
        if not improved:
            break
    return z, f


def sphere_oracle(ps: PointSet, p: float, restarts: int = 16, seed: int = 0):
    """Heuristic minimizer of ||A~ z||_p over the unit sphere.

    Warm starts: the n coordinate axes, the SVD bottom singular vector, and
    `restarts` random unit vectors. Returns (z, value) for the best start;
    ties are broken by start order so the result is deterministic.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    spec = ProblemSpec(k=ps.n - 1, p=p)
    A = normalize_measures(ps, spec).rows
    n = ps.n
    starts = [np.eye(n)[:, j] for j in range(n)]
    starts.append(svd_optimal(ps, n - 1).complement_Z[:, 0])
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        v = rng.standard_normal(n)
        starts.append(v / np.linalg.norm(v))
    best_z, best_f = None, np.inf
    for z0 in starts:
        z, f = _sphere_descent(A, p, z0)
        if f < best_f:
            best_z, best_f = z, f
    return best_z, float(best_f ** (1.0 / p))


def _grid_2d(step):
    theta = np.arange(0.0, np.pi, step)
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def grid_oracle(ps: PointSet, p: float, resolution: float = 1e-3) -> GridBracket:
    """Dense angular grid bracket of min ||A~ z||_p for n in {2,3}.

    The cost is Lipschitz on the sphere with constant
    L = (sum_i ||a~_i||^p)^(1/p), and every unit vector is within the cover
    radius of some grid point, so grid_min - L*cover certifies a lower bound.
    """
    if ps.n not in (2, 3):
        raise ValueError(f"grid_oracle supports n in {{2,3}}, got n={ps.n}")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    spec = ProblemSpec(k=ps.n - 1, p=p)
    A = normalize_measures(ps, spec).rows
    L = float(np.sum(np.linalg.norm(A, axis=1) ** p) ** (1.0 / p))
    best_val = np.inf
    best_z = None
    if ps.n == 2:
        Z = _grid_2d(resolution)
        vals = np.sum(np.abs(Z @ A.T) ** p, axis=1) ** (1.0 / p)
        j = int(np.argmin(vals))
        best_val, best_z = float(vals[j]), Z[j]
        cover = resolution  # max angular gap/2 = step/2; chord <= arc
    else:
        phi = np.arange(0.0, np.pi, resolution)  # hemisphere suffices (cost is even)
        theta = np.arange(0.0, np.pi + resolution, resolution)
        for th_chunk in np.array_split(theta, max(1, theta.size // 64)):
            st, ct = np.sin(th_chunk), np.cos(th_chunk)
            Z = np.empty((th_chunk.size * phi.size, 3))
            Z[:, 0] = np.outer(st, np.cos(phi)).ravel()
            Z[:, 1] = np.outer(st, np.sin(phi)).ravel()
            Z[:, 2] = np.repeat(ct, phi.size)
            vals = np.sum(np.abs(Z @ A.T) ** p, axis=1) ** (1.0 / p)
            j = int(np.argmin(vals))
            if vals[j] < best_val:
                best_val, best_z = float(vals[j]), Z[j].copy()
        cover = resolution  # (step/2)*sqrt(2) <= step on the (theta,phi) product grid
    return GridBracket(
        grid_min=best_val,
        lower_bound=best_val - L * cover,
        argmin_z=best_z,
        cover_radius=cover,
        lipschitz=L,
    )
