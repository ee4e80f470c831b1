import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

from config import ToleranceConfig, default_seed, get_tolerances, use_tolerances
from utils.errors import ConfigError


def test_default_seed_reads_environment(monkeypatch):
    monkeypatch.delenv("TICKWORK_SEED", raising=False)
    assert default_seed() == 0
    monkeypatch.setenv("TICKWORK_SEED", "17")
    assert default_seed() == 17


@pytest.mark.parametrize("raw", ["abc", "1.5", ""])
def test_non_integer_seed_is_config_error(monkeypatch, raw):
    monkeypatch.setenv("TICKWORK_SEED", raw)
    with pytest.raises(ConfigError, match="TICKWORK_SEED") as info:
        default_seed()
    assert info.value.kind == "validation"


def test_tolerances_from_environment(monkeypatch):
    monkeypatch.setenv("TICKWORK_TOL_TRACE", "1e-9")
    assert ToleranceConfig.from_env().trace == 1e-9


@pytest.mark.parametrize("raw", ["tiny", "-1e-9", "0"])
def test_bad_tolerance_environment_is_config_error(monkeypatch, raw):
    monkeypatch.setenv("TICKWORK_TOL_TRACE", raw)
    with pytest.raises(ConfigError):
        ToleranceConfig.from_env()


def test_unknown_override_is_rejected():
    with pytest.raises(ValueError, match="bogus"):
        with use_tolerances(bogus=1.0):
            pass


def test_overrides_nest_and_restore():
    baseline = get_tolerances()
    with use_tolerances(trace=1e-6) as outer:
        assert outer.hermitian == baseline.hermitian
        with use_tolerances(psd=1e-5):
            assert get_tolerances().trace == 1e-6
            assert get_tolerances().psd == 1e-5
        assert get_tolerances().psd == baseline.psd
    assert get_tolerances() == baseline


def test_overrides_are_isolated_between_threads():
    baseline = get_tolerances().trace
    entered, observed = threading.Event(), threading.Event()
    seen = {}

    def override():
        with use_tolerances(trace=1e-3):
            entered.set()
            assert observed.wait(timeout=10)
            seen["inside"] = get_tolerances().trace

    def observe():
        assert entered.wait(timeout=10)
        seen["other"] = get_tolerances().trace
        observed.set()

    with ThreadPoolExecutor(max_workers=2) as pool:
        futures = [pool.submit(override), pool.submit(observe)]
        for future in futures:
            future.result()
    assert seen == {"inside": 1e-3, "other": baseline}
    assert get_tolerances().trace == baseline
