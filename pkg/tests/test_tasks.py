from pathlib import Path

import pytest

from config import RunConfig, get_tolerances
from tasks.base import Invocation, Task, TaskKind, TaskResult
from tasks.builtin import get_builtin_tasks
from tasks.builtin.registry import TaskRegistry, create_default_registry
from utils.errors import DegeneracyError


def run_config(name, *paths, **kwargs):
    return RunConfig(subcommand=name, spec_paths=[Path(p) for p in paths], **kwargs)


class ToleranceEcho(Task):
    name = "fcs"
    description = "Reports the active structure tolerance."
    kind = TaskKind.MODEL

    @property
    def schema(self):
        from pydantic import BaseModel

        return BaseModel

    def execute(self, invocation):
        return TaskResult.success_result({"structure": get_tolerances().structure})


class Failing(Task):
    name = "validate"

    @property
    def schema(self):
        from pydantic import BaseModel

        return BaseModel

    def execute(self, invocation):
        raise DegeneracyError("two steady states")


class Crashing(Failing):
    def execute(self, invocation):
        raise RuntimeError("boom")


def test_default_registry_has_every_subcommand():
    registry = create_default_registry()
    names = [task.name for task in registry.get_tasks()]
    assert names == [
        "validate", "evolve", "fcs", "waiting-time", "allan", "sample",
        "pair", "relative-counts", "discrete", "ki", "zeno", "swp",
    ]
    assert len(get_builtin_tasks()) == 12


def test_register_and_unregister():
    registry = TaskRegistry()
    registry.register(ToleranceEcho())
    assert registry.get("fcs") is not None
    assert registry.unregister("fcs")
    assert not registry.unregister("fcs")


def test_unknown_task_is_validation_error():
    result = create_default_registry().invoke("nope", {}, run_config("fcs"))
    assert not result.success
    assert result.error_kind == "validation"


def test_bad_parameters_are_validation_errors(fixture_path):
    result = create_default_registry().invoke(
        "fcs", {"method": "guess"}, run_config("fcs", fixture_path("poisson.json"))
    )
    assert result.error_kind == "validation"
    assert "method" in result.error


def test_tickwork_errors_keep_their_kind():
    registry = TaskRegistry()
    registry.register(Failing())
    result = registry.invoke("validate", {}, run_config("validate"))
    assert result.error_document() == {"error_kind": "degeneracy", "detail": "two steady states"}


def test_unexpected_errors_are_internal():
    registry = TaskRegistry()
    registry.register(Crashing())
    result = registry.invoke("validate", {}, run_config("validate"))
    assert result.error_kind == "internal"
    assert "boom" in result.error


def test_tolerance_overrides_apply_during_execution():
    registry = TaskRegistry()
    registry.register(ToleranceEcho())
    result = registry.invoke("fcs", {}, run_config("fcs", tolerance_overrides={"structure": 1e-6}))
    assert result.payload == {"structure": 1e-6}
    assert get_tolerances().structure != 1e-6


def test_run_config_rejects_foreign_format():
    with pytest.raises(ValueError):
        RunConfig(subcommand="fcs", output_format="csv")
    with pytest.raises(ValueError):
        RunConfig(subcommand="nope")
    with pytest.raises(ValueError):
        RunConfig(subcommand="fcs", tolerance_overrides={"bogus": 1.0})


def test_invocation_requires_spec_file():
    invocation = Invocation(params={}, run=run_config("fcs"))
    from utils.errors import PreconditionError

    with pytest.raises(PreconditionError):
        invocation.spec()


def test_fcs_task_on_fixture(fixture_path):
    result = create_default_registry().invoke("fcs", {}, run_config("fcs", fixture_path("erlang3.json")))
    assert result.success
    assert result.payload["r1"] == pytest.approx(3.0, rel=1e-5)


def test_evolve_task_truncation_message(fixture_path):
    result = create_default_registry().invoke(
        "evolve", {"times": [0.0, 20.0], "n_max": 2}, run_config("evolve", fixture_path("poisson.json"), output_format="csv")
    )
    assert result.error_kind == "truncation"
    assert "--n-max" in result.error


def test_allan_trajectory_needs_length(fixture_path):
    result = create_default_registry().invoke(
        "allan", {"taus": [1.0], "mode": "trajectory"}, run_config("allan", fixture_path("poisson.json"))
    )
    assert result.error_kind == "precondition"


def test_zeno_task_rejects_unknown_schedule():
    result = create_default_registry().invoke(
        "zeno", {"omega": 1.0, "time": 1.0, "counts": [1], "schedule": "sometimes"}, run_config("zeno")
    )
    assert result.error_kind == "validation"
