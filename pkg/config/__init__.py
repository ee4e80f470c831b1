from config.config import (
    RunConfig,
    SUBCOMMAND_FORMATS,
    ToleranceConfig,
    default_log_level,
    default_seed,
    get_tolerances,
    use_tolerances,
)

__all__ = [
    "RunConfig",
    "SUBCOMMAND_FORMATS",
    "ToleranceConfig",
    "default_log_level",
    "default_seed",
    "get_tolerances",
    "use_tolerances",
]
