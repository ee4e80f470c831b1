import logging
from typing import Any

from config import RunConfig, use_tolerances
from tasks.base import Invocation, Task, TaskResult
from tasks.builtin import get_builtin_tasks
from utils.errors import TickworkError

logger = logging.getLogger(__name__)


class TaskRegistry:
    """
    A registry of tasks, keyed by subcommand name.
    """
    def __init__(self) -> None:
        self._tasks: dict[str, Task] = {}

    def register(self, task: Task) -> None:
        if task.name in self._tasks:
            logger.warning(f"Overwrite existing task: {task.name}")
        self._tasks[task.name] = task
        logger.debug(f"Registered task: {task.name}")

    def unregister(self, name: str) -> bool:
        if name in self._tasks:
            del self._tasks[name]
            logger.debug(f"Unregistered task: {name}")
            return True
        return False

    def get_tasks(self) -> list[Task]:
        return list(self._tasks.values())

    def get(self, name: str) -> Task | None:
        return self._tasks.get(name)

    def invoke(self, name: str, params: dict[str, Any], run: RunConfig) -> TaskResult:
        """
        Invokes a task by name.

        Parameters are validated against the task schema first. The run's
        tolerance overrides are active for the whole execution.

        Args:
            name: The subcommand name.
            params: Raw task parameters.
            run: The run configuration.

        Returns:
            The task result; failures come back as error results carrying
            the `kind` of the raised `TickworkError`, or "internal".
        """
        task = self.get(name)
        if task is None:
            return TaskResult.error_result(f"Unknown task: {name}", "validation")

        validation_errors = task.validate_params(params)
        if validation_errors:
            return TaskResult.error_result(
                f"Invalid parameters for {name}: {'; '.join(validation_errors)}", "validation"
            )

        invocation = Invocation(params=params, run=run)
        try:
            with use_tolerances(**run.tolerance_overrides):
                return task.execute(invocation)
        except TickworkError as e:
            logger.debug(f"Task {name} failed with {e.kind}: {e.detail}")
            return TaskResult.error_result(e.detail, e.kind)
        except Exception as e:
            logger.exception(f"Unexpected failure in task {name}")
            return TaskResult.error_result(f"Error executing {name}: {e}", "internal")


def create_default_registry() -> TaskRegistry:
    """
    Creates a registry holding every built-in task.
    """
    registry = TaskRegistry()
    for task_class in get_builtin_tasks():
        registry.register(task_class())
    return registry
