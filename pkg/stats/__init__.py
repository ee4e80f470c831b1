from stats.allan import AllanEstimate, allan_variance_formula, allan_variance_trajectory
from stats.fcs import AsymptoticRates, cross_validated_rates, fcs_rates
from stats.waiting import (
    PrecisionReport,
    WaitingTimeDistribution,
    check_precision_identity,
    delay_function_on,
    is_reset_clock,
    laplace_moments,
    reset_state_of,
    waiting_time,
)

__all__ = [
    "AllanEstimate",
    "AsymptoticRates",
    "PrecisionReport",
    "WaitingTimeDistribution",
    "allan_variance_formula",
    "allan_variance_trajectory",
    "check_precision_identity",
    "delay_function_on",
    "cross_validated_rates",
    "fcs_rates",
    "is_reset_clock",
    "laplace_moments",
    "reset_state_of",
    "waiting_time",
]
