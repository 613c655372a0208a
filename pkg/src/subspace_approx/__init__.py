"""lp subspace approximation: convex relaxation, randomized rank reduction,
exact baselines, and hardness-reduction instance generators."""

__version__ = "0.1.0"

from .instance import (
    PointSet,
    ProblemSpec,
    SubspaceSolution,
    load_instance,
    normalize_measures,
    relaxation_cost,
    save_instance,
    subspace_cost,
)
from .moments import bernoulli_moment_exact, binomial_moment_exact, check_bounds, gamma_p
from .relaxation import RelaxationSolution, SolverConfig, solve_relaxation
from .rounding import RoundingConfig, expected_ratio_bound, greedy_partition, round_solution
from .baselines import grid_oracle, sphere_oracle, svd_optimal
from .spectral import project_capped_simplex, project_feasible, sym_eigen

__all__ = [
    "PointSet",
    "ProblemSpec",
    "SubspaceSolution",
    "RelaxationSolution",
    "SolverConfig",
    "RoundingConfig",
    "load_instance",
    "save_instance",
    "normalize_measures",
    "subspace_cost",
    "relaxation_cost",
    "gamma_p",
    "bernoulli_moment_exact",
    "binomial_moment_exact",
    "check_bounds",
    "solve_relaxation",
    "greedy_partition",
    "round_solution",
    "expected_ratio_bound",
    "svd_optimal",
    "sphere_oracle",
    "grid_oracle",
    "sym_eigen",
    "project_capped_simplex",
    "project_feasible",
]
