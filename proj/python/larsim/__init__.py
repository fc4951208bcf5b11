"""Low-approximate-regret learning dynamics: learner updates, certificate
algebra, smoothness bound formulas, and the config-driven experiment runner.

Everything lives in the compiled extension; this package just re-exports it.
"""

from larsim._core import (  # noqa: F401
    ConfigError,
    DomainError,
    Learner,
    __version__,
    best_fixed_comparator,
    best_shifting_comparator,
    budget_for,
    config_hash,
    empirical_quantile,
    epsilon_from_hp_gamma,
    expected_value,
    hedge_update,
    hp_gamma_from_epsilon,
    importance_weighted_estimate,
    lar_residual,
    lar_residual_utility,
    log_barrier_step,
    mix_with_uniform,
    noisy_hedge_update,
    normalize,
    optimistic_hedge_update,
    poa_bound_cost,
    poa_bound_utility,
    run_experiment_file,
    run_experiment_text,
    solve_normalizer_gamma,
    turnover_threshold,
    welfare_fraction,
)
