from discrete.maps import (
    BitString,
    DiscreteStep,
    FirstTickDistribution,
    binned_waiting_time,
    bitstring_distribution,
    build_step,
    convergence_table,
    total_variation,
)

__all__ = [
    "BitString",
    "DiscreteStep",
    "FirstTickDistribution",
    "binned_waiting_time",
    "bitstring_distribution",
    "build_step",
    "convergence_table",
    "total_variation",
]
