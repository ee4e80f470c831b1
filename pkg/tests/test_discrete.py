import numpy as np
import pytest

from clock import erlang_clock, poisson_clock
from clock.library import coherent_two_level_clock
from discrete import (
    BitString,
    binned_waiting_time,
    bitstring_distribution,
    build_step,
    convergence_table,
    total_variation,
)
from utils.errors import HorizonError, StabilityError


def test_exact_poisson_step():
    step = build_step(poisson_clock(), 0.1)
    assert step.m0.matrix[0, 0].real == pytest.approx(np.exp(-0.1))
    assert step.m1.matrix[0, 0].real == pytest.approx(1.0 - np.exp(-0.1))


@pytest.mark.parametrize("spec", [poisson_clock(), erlang_clock(3), coherent_two_level_clock()])
def test_exact_instrument_is_trace_preserving(spec):
    step = build_step(spec, 0.2)
    assert (step.m0 + step.m1).is_trace_preserving(1e-10)


@pytest.mark.parametrize("spec", [erlang_clock(2), coherent_two_level_clock()])
def test_exact_pmf_matches_binned_waiting_time(spec):
    delta = 0.25
    k = 200
    rho = spec.initial_clockwork
    discrete = bitstring_distribution(build_step(spec, delta), rho, k)
    continuous = binned_waiting_time(spec, rho, delta, k)
    assert total_variation(discrete.pmf, continuous) < 1e-8
    assert discrete.total == pytest.approx(1.0)


def test_first_order_error_shrinks_with_step():
    spec = erlang_clock(2)
    rows = convergence_table(spec, spec.initial_clockwork, [0.2, 0.1, 0.05], horizon=40.0)
    tvs = [row["tv"] for row in rows]
    assert tvs[0] > tvs[1] > tvs[2]
    assert rows[1]["steps"] in (400, 401)


def test_first_order_error_halves_with_step():
    spec = erlang_clock(3)
    mu = 3.0
    rows = convergence_table(spec, spec.initial_clockwork, [mu / 200, mu / 400], horizon=40.0)
    ratio = rows[0]["tv"] / rows[1]["tv"]
    assert 1.6 <= ratio <= 2.4


def test_first_order_stability_limit():
    with pytest.raises(StabilityError):
        build_step(poisson_clock(10.0), 0.1, "first")
    assert build_step(poisson_clock(1.0), 0.1, "first").order == "first"


def test_step_arguments_checked():
    with pytest.raises(ValueError):
        build_step(poisson_clock(), 0.0)
    with pytest.raises(ValueError):
        build_step(poisson_clock(), 0.1, "second")


def test_short_horizon_raises():
    step = build_step(poisson_clock(), 0.1)
    with pytest.raises(HorizonError):
        bitstring_distribution(step, np.ones((1, 1)), 10)
    partial = bitstring_distribution(step, np.ones((1, 1)), 10, coverage_tol=None)
    assert partial.remainder == pytest.approx(np.exp(-1.0))


def test_bitstring_probability():
    step = build_step(poisson_clock(), 0.5)
    bits = BitString((0, 0, 1), 0.5)
    assert bits.first_tick() == 3
    p = bits.probability(step, np.ones((1, 1)))
    assert p == pytest.approx(np.exp(-1.0) * (1 - np.exp(-0.5)))
    assert BitString((0, 0), 0.5).first_tick() is None
    with pytest.raises(ValueError):
        BitString((2,), 0.5)
    with pytest.raises(ValueError):
        bits.probability(build_step(poisson_clock(), 0.25), np.ones((1, 1)))


def test_total_variation_pads():
    assert total_variation(np.array([0.5, 0.5]), np.array([1.0])) == pytest.approx(0.5)
    assert total_variation(np.array([1.0]), np.array([1.0])) == 0.0
