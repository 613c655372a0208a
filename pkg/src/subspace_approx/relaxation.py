"""Projected first-order solver for the convex relaxation

    minimize (sum_i mu(i) * (a_i^T X a_i)^(p/2))^(1/p)
    over     {0 <= X <= I, Tr(X) >= n-k},  p >= 2.

The un-rooted objective F(X) = sum_i mu(i) (a_i^T X a_i)^(p/2) is convex for
p >= 2 and is what the descent works with; the reported value is F^(1/p).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .instance import InstanceValidationError, PointSet, ProblemSpec, relaxation_cost
from .spectral import EigenSpectrum, project_feasible, sym_eigen


class UnsupportedExponentError(ValueError):
    """The relaxation objective is only convex for p >= 2."""


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 2000
    tol: float = 1e-9  # relative objective decrease over `window` iterations
    window: int = 10
    armijo_beta: float = 0.5
    armijo_sigma: float = 1e-4
    initial_step: float = 1.0
    grad_clamp_eps: float = 1e-12

    def __post_init__(self):
        if not (0 < self.tol < 1 and self.max_iters > 0 and 0 < self.armijo_beta < 1
                and self.armijo_sigma > 0 and self.initial_step > 0 and self.grad_clamp_eps > 0):
            raise ValueError("invalid solver configuration")


@dataclass(frozen=True)
class RelaxationSolution:
    X: np.ndarray
    value: float
    spectrum: EigenSpectrum
    iterations: int
    converged: bool


def _check_p(p):
    if p < 2:
        raise UnsupportedExponentError(
            f"relaxation objective requires p >= 2 (got p={p}); it is non-convex below 2")


def relaxation_objective_raw(ps: PointSet, p: float, X) -> float:
    """F(X) = sum_i mu(i) * (a_i^T X a_i)^(p/2), the un-rooted descent objective."""
    _check_p(p)
    X = np.asarray(X, dtype=float)
    if X.shape != (ps.n, ps.n):
        raise InstanceValidationError(f"X must be {ps.n} x {ps.n}, got {X.shape}")
    q = np.clip(np.einsum("ij,jk,ik->i", ps.rows, X, ps.rows), 0.0, None)
    return float(np.dot(ps.mu(), q ** (p / 2.0)))


def relaxation_gradient(ps: PointSet, p: float, X, grad_clamp_eps: float = 1e-12):
    """grad F(X) = (p/2) * sum_i mu(i) (a_i^T X a_i)^((p-2)/2) a_i a_i^T.

    For 2 <= p < 4 the exponent (p-2)/2 lies in [0,1) and the power has
    infinite slope at 0; quadratic forms are clamped below grad_clamp_eps
    there, which selects a bounded subgradient element.
    """
    _check_p(p)
    X = np.asarray(X, dtype=float)
    if X.shape != (ps.n, ps.n):
        raise InstanceValidationError(f"X must be {ps.n} x {ps.n}, got {X.shape}")
    q = np.clip(np.einsum("ij,jk,ik->i", ps.rows, X, ps.rows), 0.0, None)
    if p < 4:
        q = np.clip(q, grad_clamp_eps, None)
    w = (p / 2.0) * ps.mu() * q ** ((p - 2.0) / 2.0)
    G = (ps.rows * w[:, None]).T @ ps.rows
    return (G + G.T) / 2.0


def solve_relaxation(ps: PointSet, spec: ProblemSpec, cfg: SolverConfig | None = None) -> RelaxationSolution:
    """Projected gradient with Armijo backtracking from X0 = ((n-k)/n) * I.

    Deterministic. On hitting max_iters without the windowed relative
    decrease falling below tol, returns the best iterate with
    converged=False instead of raising.
    """
    cfg = cfg or SolverConfig()
    _check_p(spec.p)
    spec.validate_against(ps.n)
    n, p = ps.n, spec.p
    s = n - spec.k
    X = (s / n) * np.eye(n)
    F = relaxation_objective_raw(ps, p, X)
    history = deque([F], maxlen=cfg.window + 1)
    step = cfg.initial_step
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        G = relaxation_gradient(ps, p, X, cfg.grad_clamp_eps)
        step = step / cfg.armijo_beta  # expand from the last accepted step
        accepted = False
        while step > 1e-18:
            Xc = project_feasible(X - step * G, s)
            decrease = float(np.tensordot(G, X - Xc))
            Fc = relaxation_objective_raw(ps, p, Xc)
            if Fc <= F - cfg.armijo_sigma * decrease + 1e-15 * max(1.0, F):
                accepted = True
                break
            step *= cfg.armijo_beta
        if accepted and Fc <= F:
            X, F = Xc, Fc
        history.append(F)
        if len(history) == cfg.window + 1:
            drop = history[0] - history[-1]
            if drop <= cfg.tol * max(history[0], 1e-300):
                converged = True
                break
    spectrum = sym_eigen(X)
    return RelaxationSolution(
        X=X,
        value=relaxation_cost(ps, spec, X),
        spectrum=spectrum,
        iterations=it,
        converged=converged,
    )
