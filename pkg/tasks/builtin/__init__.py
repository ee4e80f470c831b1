from tasks.base import Task
from tasks.builtin.discrete import DiscreteTask
from tasks.builtin.evolve import EvolveTask
from tasks.builtin.sampling import PairTask, RelativeCountsTask, SampleTask
from tasks.builtin.statistics import AllanTask, FcsTask, WaitingTimeTask
from tasks.builtin.structure import KITask, SWPTask, ZenoTask
from tasks.builtin.validate import ValidateTask

__all__ = [
    "AllanTask",
    "DiscreteTask",
    "EvolveTask",
    "FcsTask",
    "KITask",
    "PairTask",
    "RelativeCountsTask",
    "SWPTask",
    "SampleTask",
    "ValidateTask",
    "WaitingTimeTask",
    "ZenoTask",
]


def get_builtin_tasks() -> list[type[Task]]:
    """
    Returns the task classes behind the CLI subcommands, in help order.
    """
    return [
        ValidateTask,
        EvolveTask,
        FcsTask,
        WaitingTimeTask,
        AllanTask,
        SampleTask,
        PairTask,
        RelativeCountsTask,
        DiscreteTask,
        KITask,
        ZenoTask,
        SWPTask,
    ]
