from .optimizer import (
    CodeRange,
    OptimizationOutcome,
    best_code,
    crossover,
    evaluate_noise_rate,
    evaluate_rate,
    minimize_noise_over_q11,
    minimize_over_q11,
    optimal_code_table,
    optimize_noise_for_protocol,
)
from .thresholds import (
    ThresholdResult,
    Witness,
    analytic_threshold_bb84,
    analytic_threshold_six_state,
    numeric_threshold,
    repetition_r0_closed_form,
    repetition_r0_log_margin,
    repetition_r0_lower_bound,
)

__all__ = [
    "CodeRange",
    "OptimizationOutcome",
    "best_code",
    "crossover",
    "evaluate_noise_rate",
    "evaluate_rate",
    "minimize_noise_over_q11",
    "minimize_over_q11",
    "optimal_code_table",
    "optimize_noise_for_protocol",
    "ThresholdResult",
    "Witness",
    "analytic_threshold_bb84",
    "analytic_threshold_six_state",
    "numeric_threshold",
    "repetition_r0_closed_form",
    "repetition_r0_log_margin",
    "repetition_r0_lower_bound",
]
