"""The rank-gap experiment: witness value at X = I/n versus the best
subspace direction found by batched refinement of many random unit vectors."""

from __future__ import annotations

import time

import numpy as np

from .generators import gaussian_gap_instance
from .instance import relaxation_cost
from .relaxation import SolverConfig, solve_relaxation


def _batch_costs(A, Z, p):
    # Z has unit columns; counting-measure cost per column
    return np.sum(np.abs(A @ Z) ** p, axis=0) ** (1.0 / p)


def refine_directions(A, p, Z, iters=25):
    """Batched tangent-space descent of ||A z||_p over unit columns of Z.

    Per-column adaptive steps; a column only moves when its cost improves,
    so the returned costs never exceed the starting ones.
    """
    Z = Z / np.linalg.norm(Z, axis=0)
    f = _batch_costs(A, Z, p)
    fp = f ** p
    eta = None
    for _ in range(iters):
        r = A @ Z
        g = p * (A.T @ (np.sign(r) * np.abs(r) ** (p - 1.0)))
        gt = g - Z * np.sum(g * Z, axis=0)
        gn2 = np.sum(gt ** 2, axis=0)
        if eta is None:
            eta = fp / np.maximum(gn2, 1e-300)
        cand = Z - gt * eta
        cand /= np.linalg.norm(cand, axis=0)
        fc = _batch_costs(A, cand, p)
        better = fc < f
        Z[:, better] = cand[:, better]
        f[better] = fc[better]
        fp = f ** p
        eta = np.where(better, eta * 1.5, eta * 0.3)
    return Z, f


def gap_experiment(n, m, p, seeds, directions=1000, refine_iters=25,
                   run_solver=False, solver_cfg: SolverConfig | None = None,
                   chunk=128):
    """Per-seed gap report for the Gaussian instance family."""
    results = []
    for seed in seeds:
        t0 = time.perf_counter()
        ps, spec = gaussian_gap_instance(n=n, m=m, p=p, seed=seed)
        A = ps.rows
        witness = relaxation_cost(ps, spec, np.eye(n) / n)
        solver_value = None
        converged = None
        if run_solver:
            sol = solve_relaxation(ps, spec, solver_cfg)
            solver_value, converged = sol.value, sol.converged
        rng = np.random.default_rng(seed + 10_000_019)
        raw_min = np.inf
        ref_min = np.inf
        costs_all = []
        done = 0
        while done < directions:
            d = min(chunk, directions - done)
            Z = rng.standard_normal((n, d))
            Z /= np.linalg.norm(Z, axis=0)
            raw = _batch_costs(A, Z, p)
            raw_min = min(raw_min, float(raw.min()))
            _, refined = refine_directions(A, p, Z, iters=refine_iters)
            ref_min = min(ref_min, float(refined.min()))
            costs_all.append(refined)
            done += d
        costs_all = np.concatenate(costs_all)
        relax = min(witness, solver_value) if solver_value is not None else witness
        results.append({
            "seed": int(seed),
            "witness_value": witness,
            "solver_value": solver_value,
            "solver_converged": converged,
            "direction_min_raw": raw_min,
            "direction_min_refined": ref_min,
            "direction_mean_refined": float(costs_all.mean()),
            "direction_stderr": float(costs_all.std(ddof=1) / np.sqrt(costs_all.size)),
            "empirical_gap": ref_min / relax,
            "wall_time_s": time.perf_counter() - t0,
        })
    return results
