from clock.io import dumps_spec, load_spec, parse_spec, save_spec
from clock.library import (
    branching_clock,
    coherent_two_level_clock,
    dephasing_qubit,
    erlang_clock,
    poisson_clock,
)
from clock.model import ClockSpec, GeneralClockSpec, GeneralJump, JumpTerm, PropertyFlags
from clock.validate import (
    GeneralReport,
    general_to_clock_spec,
    require_elementary,
    validate_elementary,
    validate_general,
)

__all__ = [
    "ClockSpec",
    "GeneralClockSpec",
    "GeneralJump",
    "GeneralReport",
    "JumpTerm",
    "PropertyFlags",
    "branching_clock",
    "coherent_two_level_clock",
    "dephasing_qubit",
    "dumps_spec",
    "erlang_clock",
    "general_to_clock_spec",
    "load_spec",
    "parse_spec",
    "poisson_clock",
    "require_elementary",
    "save_spec",
    "validate_elementary",
    "validate_general",
]
