"""Gaussian and Bernoulli moment machinery.

gamma_p is the p-th norm of a standard normal. bernoulli_moment_exact
enumerates E|sum c_i x_i|^p over all sign patterns; binomial_moment_exact
evaluates the uniform-coefficient case from the binomial pmf so very large R
stays exact. check_bounds compares the exact moment against the Khintchine
upper bound and the Berry-Esseen-style lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ENUMERATION_LIMIT = 22  # 2^22 ~ 4M sign patterns


def gamma_p(p: float) -> float:
    """p-th norm of N(0,1): (2^(p/2) Gamma((p+1)/2) / sqrt(pi))^(1/p).

    Evaluated via log-Gamma so large p does not overflow.
    """
    if not np.isfinite(p) or p < 1:
        raise ValueError(f"gamma_p requires finite p >= 1, got {p}")
    logval = 0.5 * p * math.log(2.0) + math.lgamma((p + 1) / 2.0) - 0.5 * math.log(math.pi)
    return math.exp(logval / p)


def bernoulli_moment_exact(c, p: float) -> float:
    """Exact E|sum c_i x_i|^p over uniform signs x in {-1,1}^R, R <= 22."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise ValueError("c must be a non-empty 1-d vector")
    if not np.all(np.isfinite(c)):
        raise ValueError("c has non-finite entries")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    R = c.size
    if R > ENUMERATION_LIMIT:
        raise ValueError(
            f"R={R} exceeds the enumeration limit {ENUMERATION_LIMIT}; use "
            "binomial_moment_exact for uniform coefficients or Monte Carlo")
    sums = np.zeros(1)
    for ci in c:
        sums = np.concatenate([sums + ci, sums - ci])
    # compensated summation: enumeration sums can span many magnitudes
    return math.fsum(np.abs(sums) ** p) / 2.0 ** R


def binomial_moment_exact(R: int, p: float) -> float:
    """Exact E|S|^p for S = (1/sqrt(R)) * sum of R uniform signs.

    O(R) evaluation from the binomial(R, 1/2) pmf with log-space binomial
    coefficients.
    """
    if int(R) != R or R < 1:
        raise ValueError(f"R must be a positive integer, got {R}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    k = np.arange(R + 1)
    logw = (math.lgamma(R + 1) - np.array([math.lgamma(i + 1) + math.lgamma(R - i + 1) for i in k])
            - R * math.log(2.0))
    s = np.abs(2.0 * k - R) / math.sqrt(R)
    terms = np.where(s > 0, np.exp(logw + p * np.log(np.where(s > 0, s, 1.0))), 0.0)
    return math.fsum(terms)


@dataclass(frozen=True)
class MomentBoundReport:
    exact_moment: float
    upper_bound: float
    lower_bound: float
    tau: float
    holds_upper: bool
    holds_lower: bool | None  # None when tau >= e^-4 (hypothesis not met)


def check_bounds(c, p: float) -> MomentBoundReport:
    """Exact moment of sum(c_i x_i) against the Gaussian-comparison bounds.

    The lower bound is only asserted under its stated hypothesis
    tau = max|c_i|/||c|| < e^-4; outside that range holds_lower is None and
    the (possibly vacuous) bound value is still reported.
    """
    c = np.asarray(c, dtype=float)
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        raise ValueError("c must be nonzero")
    tau = float(np.max(np.abs(c)) / norm)
    if c.size <= ENUMERATION_LIMIT:
        exact = bernoulli_moment_exact(c, p)
    elif np.allclose(np.abs(c), np.abs(c[0]), rtol=0, atol=0):
        exact = binomial_moment_exact(c.size, p) * (abs(c[0]) * math.sqrt(c.size)) ** p
    else:
        raise ValueError(
            f"R={c.size} exceeds the enumeration limit and coefficients are "
            "not uniform; no exact path available")
    gp = gamma_p(p) ** p
    upper = gp * norm ** p
    lower = gp * norm ** p * (1.0 - 10.0 * tau * math.log(1.0 / tau) ** (p / 2.0))
    holds_lower = bool(exact >= lower) if tau < math.exp(-4) else None
    return MomentBoundReport(
        exact_moment=exact,
        upper_bound=upper,
        lower_bound=lower,
        tau=tau,
        holds_upper=bool(exact <= upper * (1 + 1e-12)),
        holds_lower=holds_lower,
    )
