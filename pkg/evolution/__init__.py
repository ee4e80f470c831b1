from evolution.generator import (
    TruncatedRegister,
    build_generator,
    general_lindbladian,
    generator_parts,
    register_lindbladian,
    register_projectors,
    routed_generator,
    tick_generator,
)
from evolution.register import (
    ClockState,
    RegisterPropagator,
    TickMoments,
    TickNumberDistribution,
    evolve,
    evolve_general,
    evolve_to_times,
    tick_number_distribution,
    tick_number_moments,
    time_of_arrival_density,
)

__all__ = [
    "ClockState",
    "RegisterPropagator",
    "TickMoments",
    "TickNumberDistribution",
    "TruncatedRegister",
    "build_generator",
    "evolve",
    "evolve_general",
    "evolve_to_times",
    "general_lindbladian",
    "generator_parts",
    "register_lindbladian",
    "register_projectors",
    "routed_generator",
    "tick_generator",
    "tick_number_distribution",
    "tick_number_moments",
    "time_of_arrival_density",
]
