from trajectories.jumps import (
    JumpChannel,
    Unraveler,
    clock_unraveler,
    sample_trajectories,
    sample_trajectory,
)
from trajectories.pairs import (
    RelativeCountDistribution,
    relative_counts,
    sample_joint,
    sample_pair,
    sample_pairs,
)
from trajectories.records import TickRecord, TickSequence

__all__ = [
    "JumpChannel",
    "RelativeCountDistribution",
    "TickRecord",
    "TickSequence",
    "Unraveler",
    "clock_unraveler",
    "relative_counts",
    "sample_joint",
    "sample_pair",
    "sample_pairs",
    "sample_trajectories",
    "sample_trajectory",
]
