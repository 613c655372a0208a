"""Randomized rank reduction: greedy eigenvalue binning, Bernoulli sign
combinations within bins, normalization, and best-of-runs selection.

Each of the n-k bins accumulates spectral mass at least 1/(2 - 1/(n-k)) when
the eigenvalues are in [0,1] and sum to at least n-k, so the combined vectors
are never degenerate for exactly-feasible inputs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .instance import InstanceValidationError, PointSet, ProblemSpec, SubspaceSolution, subspace_cost
from .moments import gamma_p
from .relaxation import RelaxationSolution
from .spectral import sym_eigen


@dataclass(frozen=True)
class GreedyPartition:
    bins: list  # n-k disjoint index lists covering range(r)
    bin_sums: np.ndarray


@dataclass(frozen=True)
class RoundingConfig:
    runs: int = 32
    seed: int = 0
    eig_clamp: float = 1e-10
    feas_slack: float = 1e-6

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def thread_cap() -> int:
    """Worker cap from SUBSPACE_THREADS (0 or unset = auto)."""
    raw = os.environ.get("SUBSPACE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return cap


def greedy_partition(lam, bins: int) -> GreedyPartition:
    """Assign eigenvalues, in descending order, each to the currently
    lightest bin; ties broken by lowest bin index."""
    lam = np.asarray(lam, dtype=float)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if lam.size < bins:
        raise ValueError(f"cannot fill {bins} bins from {lam.size} eigenvalues; "
                         "pad with zero eigenvalues first")
    if np.any(np.diff(lam) > 1e-12):
        raise ValueError("lam must be sorted non-increasing")
    sums = np.zeros(bins)
    out = [[] for _ in range(bins)]
    for t in range(lam.size):
        j = int(np.argmin(sums))  # argmin returns the first (lowest-index) minimum
        out[j].append(t)
        sums[j] += lam[t]
    return GreedyPartition(bins=out, bin_sums=sums)


def expected_ratio_bound(n: int, k: int, p: float) -> float:
    """gamma_q * sqrt(2 - 1/(n-k)) with q the smallest even integer >= p."""
    if not 1 <= n - k <= n:
        raise ValueError(f"need 1 <= n-k <= n, got n={n}, k={k}")
    q = 2 * math.ceil(p / 2.0)
    return gamma_p(q) * math.sqrt(2.0 - 1.0 / (n - k))


def _run_rng(seed: int, run_index: int):
    # counter-based Philox keyed by (master seed, run index): reproducible
    # and independent across runs regardless of execution order
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, run_index])))


def _orthonormal_completion(V, count):
    """Deterministic orthonormal vectors spanning the complement of V's columns."""
    n = V.shape[0]
    P = np.eye(n) - V @ V.T if V.size else np.eye(n)
    spec = sym_eigen(P)
    return spec.vectors[:, :count]


def _prepare_rounding(solution: RelaxationSolution, n: int, k: int, cfg: RoundingConfig):
    lam = solution.spectrum.values
    vecs = solution.spectrum.vectors
    if lam.min() < -cfg.feas_slack or lam.max() > 1.0 + cfg.feas_slack:
        raise InstanceValidationError(
            f"X infeasible beyond slack: eigenvalues in [{lam.min():.3e}, {lam.max():.3e}]")
    if lam.sum() < (n - k) - cfg.feas_slack:
        raise InstanceValidationError(
            f"X infeasible beyond slack: trace {lam.sum():.6f} < {n - k}")
    lam = np.clip(lam, 0.0, 1.0)
    keep = lam > cfg.eig_clamp
    lam, vecs = lam[keep], vecs[:, keep]
    b = n - k
    n_pad = max(0, b - lam.size)
    if n_pad:
        pad = _orthonormal_completion(vecs, n_pad)
        vecs = np.hstack([vecs, pad])
        lam = np.concatenate([lam, np.zeros(n_pad)])
    part = greedy_partition(lam, b)
    return lam, vecs, part


def _single_run(ps, spec, lam, vecs, part, rng):
    n = ps.n
    b = len(part.bins)
    signs = rng.integers(0, 2, size=lam.size) * 2.0 - 1.0
    Z = np.empty((n, b))
    for j, idx in enumerate(part.bins):
        idx = np.asarray(idx, dtype=int)
        y = vecs[:, idx] @ (signs[idx] * np.sqrt(lam[idx]))
        norm = np.linalg.norm(y)
        if norm < 1e-12:
            # only reachable in the padded degenerate case: the bin holds a
            # single zero-eigenvalue completion vector, itself unit norm
            y = vecs[:, idx[0]]
            norm = 1.0
        Z[:, j] = y / norm
    return Z, subspace_cost(ps, spec, Z)


def round_solution(ps: PointSet, spec: ProblemSpec, solution: RelaxationSolution,
                   cfg: RoundingConfig | None = None) -> SubspaceSolution:
    """Best-of-runs rank reduction of a feasible relaxation solution.

    Deterministic given (instance, solution, seed, runs): each run owns a
    Philox stream keyed by (seed, run index) and the merge is an argmin with
    lowest-run-index tie-breaking.
    """
    cfg = cfg or RoundingConfig()
    spec.validate_against(ps.n)
    lam, vecs, part = _prepare_rounding(solution, ps.n, spec.k, cfg)

    def run_one(run):
        return _single_run(ps, spec, lam, vecs, part, _run_rng(cfg.seed, run))

    workers = min(thread_cap(), cfg.runs)
    if workers > 1 and cfg.runs >= 8:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, range(cfg.runs)))
    else:
        results = [run_one(run) for run in range(cfg.runs)]
    best = None
    for run, (Z, value) in enumerate(results):
        if best is None or value < best[1]:
            best = (Z, value, run)
    return SubspaceSolution(Z=best[0], value=best[1], run_index=best[2])


def monte_carlo_mean_cost(ps: PointSet, spec: ProblemSpec, solution: RelaxationSolution,
                          draws: int, seed: int = 0, cfg: RoundingConfig | None = None,
                          chunk: int = 4096):
    """Monte-Carlo estimate (mean, stderr) of the rounded cost over
    independent single-run sign draws. Vectorized over draws."""
    cfg = cfg or RoundingConfig(seed=seed)
    spec.validate_against(ps.n)
    lam, vecs, part = _prepare_rounding(solution, ps.n, spec.k, cfg)
    rng = _run_rng(seed, 0)
    mu = ps.mu()
    p = spec.p
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < draws:
        d = min(chunk, draws - done)
        signs = rng.integers(0, 2, size=(d, lam.size)) * 2.0 - 1.0
        D = np.zeros((d, ps.m))
        for idx in part.bins:
            idx = np.asarray(idx, dtype=int)
            Y = signs[:, idx] * np.sqrt(lam[idx]) @ vecs[:, idx].T  # (d, n)
            norms = np.linalg.norm(Y, axis=1)
            zero = norms < 1e-12
            if np.any(zero):
                Y[zero] = vecs[:, idx[0]]
                norms[zero] = 1.0
            proj = Y @ ps.rows.T / norms[:, None]  # (d, m)
            D += proj ** 2
        costs = (D ** (p / 2.0) @ mu) ** (1.0 / p)
        total += float(costs.sum())
        total_sq += float((costs ** 2).sum())
        done += d
    mean = total / draws
    var = max(total_sq / draws - mean ** 2, 0.0)
    stderr = math.sqrt(var / draws)
    return mean, stderr
