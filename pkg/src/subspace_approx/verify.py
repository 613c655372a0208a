"""Executable property suites behind the `verify` CLI command: moment
bounds, greedy binning mass, capped-simplex projection, and p=2 exactness."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .baselines import svd_optimal
from .instance import PointSet, ProblemSpec
from .moments import bernoulli_moment_exact, gamma_p
from .relaxation import solve_relaxation
from .rounding import greedy_partition
from .spectral import project_capped_simplex, project_feasible


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)

    def check(self, ok, message):
        self.total += 1
        if ok:
            self.passed += 1
        else:
            self.failures.append(message)

    @property
    def ok(self):
        return self.passed == self.total


def brute_force_capped_simplex(mu, s, step=1e-3):
    """Dense grid search of min ||x - mu||^2 over {x in [0,1]^r : sum x >= s}.

    For r=3 the full step^-3 grid is scanned exactly via a suffix-min over
    the (x2,x3) plane sorted by coordinate sum, so no point is skipped.
    """
    mu = np.asarray(mu, dtype=float)
    grid = np.arange(0.0, 1.0 + step / 2, step)
    if mu.size == 1:
        feas = grid[grid >= s - 1e-12]
        return np.array([feas[np.argmin((feas - mu[0]) ** 2)]])
    if mu.size == 2:
        X1, X2 = np.meshgrid(grid, grid, indexing="ij")
        d = (X1 - mu[0]) ** 2 + (X2 - mu[1]) ** 2
        d[X1 + X2 < s - 1e-12] = np.inf
        j = np.unravel_index(np.argmin(d), d.shape)
        return np.array([grid[j[0]], grid[j[1]]])
    if mu.size == 3:
        X2, X3 = np.meshgrid(grid, grid, indexing="ij")
        S23 = (X2 + X3).ravel()
        D23 = ((X2 - mu[1]) ** 2 + (X3 - mu[2]) ** 2).ravel()
        order = np.argsort(S23)
        S_sorted = S23[order]
        D_sorted = D23[order]
        # suffix argmin of D over {sum >= threshold}
        suffix_idx = np.empty(order.size, dtype=int)
        best = order.size - 1
        for i in range(order.size - 1, -1, -1):
            if D_sorted[i] <= D_sorted[best]:
                best = i
            suffix_idx[i] = best
        best_val, best_x = np.inf, None
        for x1 in grid:
            pos = np.searchsorted(S_sorted, s - x1 - 1e-12, side="left")
            if pos >= order.size:
                continue
            i = suffix_idx[pos]
            val = (x1 - mu[0]) ** 2 + D_sorted[i]
            if val < best_val:
                flat = order[i]
                best_val = val
                best_x = np.array([x1, X2.ravel()[flat], X3.ravel()[flat]])
        return best_x
    raise ValueError("brute force supports r <= 3")


def suite_moments(rng=None) -> SuiteResult:
    rng = rng or np.random.default_rng(2024)
    res = SuiteResult("moments")
    for trial in range(500):
        R = int(rng.integers(1, 13))
        c = rng.standard_normal(R)
        p = float(rng.choice([2, 3, 4, 6]))
        exact = bernoulli_moment_exact(c, p)
        upper = gamma_p(p) ** p * np.linalg.norm(c) ** p
        res.check(exact <= upper * (1 + 1e-12),
                  f"Khintchine violated: R={R} p={p} exact={exact} > upper={upper}")
    for trial in range(100):
        c = rng.standard_normal(int(rng.integers(1, 13)))
        exact = bernoulli_moment_exact(c, 2.0)
        res.check(abs(exact - np.linalg.norm(c) ** 2) <= 1e-12 * max(1.0, exact),
                  f"p=2 equality violated for c={c}")
    grid = np.arange(1.0, 10.0 + 1e-9, 0.1)
    vals = [gamma_p(p) for p in grid]
    res.check(all(b >= a - 1e-12 for a, b in itertools.pairwise(vals)),
              "gamma_p not monotone on [1,10]")
    return res


def suite_greedy(rng=None) -> SuiteResult:
    rng = rng or np.random.default_rng(2025)
    res = SuiteResult("greedy")
    for trial in range(1000):
        b = int(rng.integers(1, 17))
        r = int(rng.integers(b, 65))
        lam = rng.uniform(0.0, 1.0, size=r)
        # projection yields a valid profile: entries in [0,1], sum >= b
        lam = np.sort(project_capped_simplex(lam, float(b)))[::-1]
        part = greedy_partition(lam, b)
        bound = 1.0 / (2.0 - 1.0 / b)
        res.check(part.bin_sums.min() >= bound - 1e-9,
                  f"bin mass {part.bin_sums.min()} < {bound} (trial {trial})")
    # deterministic golden traces
    part = greedy_partition(np.array([1.0, 1.0, 1.0]), 2)
    res.check(part.bins == [[0, 2], [1]], f"golden trace 1 mismatch: {part.bins}")
    part = greedy_partition(np.array([0.5, 0.5, 0.5, 0.5]), 2)
    res.check(part.bins == [[0, 2], [1, 3]], f"golden trace 2 mismatch: {part.bins}")
    return res


def suite_projection(rng=None) -> SuiteResult:
    rng = rng or np.random.default_rng(2026)
    res = SuiteResult("projection")
    for r in (2, 3):
        for trial in range(3):
            mu = rng.uniform(-0.5, 1.5, size=r)
            s = float(rng.uniform(0.0, r))
            exact = project_capped_simplex(mu, s)
            brute = brute_force_capped_simplex(mu, s)
            res.check(np.max(np.abs(exact - brute)) <= 2e-3,
                      f"grid disagreement r={r}: exact={exact} brute={brute}")
    for trial in range(200):
        n = int(rng.integers(2, 7))
        X = rng.standard_normal((n, n))
        X = (X + X.T) / 2
        s = float(rng.uniform(0.0, n))
        P = project_feasible(X, s)
        P2 = project_feasible(P, s)
        res.check(np.max(np.abs(P - P2)) <= 1e-10, f"idempotence violated (trial {trial})")
        # optimality against random feasible points
        dist = np.linalg.norm(X - P)
        ok = True
        for _ in range(5):
            lam = rng.uniform(0.0, 1.0, size=n)
            if lam.sum() < s:
                lam = project_capped_simplex(lam, s)
            Q = rng.standard_normal((n, n))
            Q, _ = np.linalg.qr(Q)
            Y = (Q * lam) @ Q.T
            if np.linalg.norm(X - Y) < dist - 1e-8:
                ok = False
        res.check(ok, f"projection not Frobenius-nearest (trial {trial})")
    return res


def suite_p2(rng=None) -> SuiteResult:
    rng = rng or np.random.default_rng(2027)
    res = SuiteResult("p2")
    for trial in range(10):
        m = int(rng.integers(3, 30))
        n = int(rng.integers(2, 9))
        k = int(rng.integers(0, n))
        ps = PointSet(rows=rng.standard_normal((m, n)))
        spec = ProblemSpec(k=k, p=2.0)
        sol = solve_relaxation(ps, spec)
        ref = svd_optimal(ps, k).optimal_value
        rel = abs(sol.value - ref) / max(ref, 1e-12)
        res.check(rel <= 1e-6, f"p=2 mismatch: solver={sol.value} svd={ref} rel={rel:.2e}")
    return res


SUITES = {
    "moments": suite_moments,
    "greedy": suite_greedy,
    "projection": suite_projection,
    "p2": suite_p2,
}


def run_suites(names):
    results = []
    for name in names:
        results.append(SUITES[name]())
    return results
