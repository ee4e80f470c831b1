import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from clock import ClockSpec, GeneralClockSpec, GeneralJump, JumpTerm, erlang_clock, poisson_clock
from clock.library import branching_clock, coherent_two_level_clock
from evolution import (
    ClockState,
    TruncatedRegister,
    build_generator,
    evolve,
    evolve_general,
    evolve_to_times,
    register_lindbladian,
    routed_generator,
    tick_generator,
    tick_number_distribution,
    tick_number_moments,
    time_of_arrival_density,
)
from evolution.register import suggested_n_max
from numerics import SuperOperator, choi_matrix, is_completely_positive, matrix_exponential
from numerics.linalg import transition
from numerics.superop import vec
from utils.errors import PreconditionError, TruncationError


@settings(max_examples=15, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=0.0, max_value=4.0),
)
def test_poisson_register_is_poisson(rate, t):
    spec = poisson_clock(rate)
    state = evolve(spec, ClockState.from_spec(spec, 60), t)
    expected = stats.poisson.pmf(np.arange(61), rate * t)
    assert np.allclose(state.probabilities()[:40], expected[:40], atol=1e-9)


def test_trace_is_preserved_with_absorbing_top_bin():
    spec = branching_clock()
    state = evolve(spec, ClockState.from_spec(spec, 3), 10.0)
    assert state.total_trace() == pytest.approx(1.0, abs=1e-9)
    assert tick_number_distribution(state).top_mass > 0.1


def test_generator_at_zero_field_is_trace_annihilating():
    for spec in (erlang_clock(3), coherent_two_level_clock(), branching_clock()):
        assert build_generator(spec).is_trace_annihilating(1e-12)


def test_tick_generator_of_silent_clock_is_zero():
    silent = ClockSpec(dim=1, hamiltonian=np.zeros((1, 1)), jumps=(), initial_clockwork=np.ones((1, 1)))
    assert not np.any(tick_generator(silent).matrix)


def test_register_routing():
    register = TruncatedRegister(3)
    assert register.target(0, 1) == 1
    assert register.target(2, 5) == 3
    assert register.target(3, -1) == 3
    assert register.target(0, -1) == 0
    with pytest.raises(ValueError):
        TruncatedRegister(-1)


def test_routed_generator_columns_sum_to_zero_trace():
    spec = erlang_clock(2)
    g = routed_generator(spec, TruncatedRegister(4))
    trace_row = np.concatenate([vec(np.eye(2))] * 5)
    assert np.allclose(trace_row @ g, 0.0, atol=1e-12)


def test_register_lindbladian_agrees_with_routed_evolution():
    spec = erlang_clock(2)
    n_max = 3
    t = 0.8
    joint = register_lindbladian(spec, n_max)
    state0 = ClockState.from_spec(spec, n_max)
    from numerics.linalg import matrix_exponential
    from numerics.superop import unvec

    rho = unvec(matrix_exponential(joint.matrix, t) @ vec(state0.to_full_density()))
    direct = evolve(spec, state0, t).to_full_density()
    assert np.allclose(rho, direct, atol=1e-8)


def test_erlang_first_tick_density():
    spec = erlang_clock(3)
    grid = np.linspace(0.0, 6.0, 13)
    density = time_of_arrival_density(spec, ClockState.from_spec(spec, 4), 1, grid)
    assert np.allclose(density, stats.gamma.pdf(grid, 3), atol=1e-7)


def test_arrival_density_needs_irreversible_ticks():
    spec = poisson_clock()
    backwards = ClockSpec(
        dim=1,
        hamiltonian=spec.hamiltonian,
        jumps=(*spec.jumps, JumpTerm(-1, 0.5, np.ones((1, 1)))),
        initial_clockwork=spec.initial_clockwork,
    )
    with pytest.raises(PreconditionError):
        time_of_arrival_density(backwards, ClockState.from_spec(backwards, 4), 1, np.array([1.0]))


def test_moments_in_request_order():
    spec = poisson_clock(2.0)
    moments = tick_number_moments(spec, ClockState.from_spec(spec, 80), [3.0, 1.0])
    assert [m.time for m in moments] == [3.0, 1.0]
    assert moments[0].mean == pytest.approx(6.0, abs=1e-7)
    assert moments[1].variance == pytest.approx(2.0, abs=1e-7)


def test_truncation_error_suggests_larger_window():
    spec = poisson_clock(5.0)
    with pytest.raises(TruncationError) as info:
        tick_number_moments(spec, ClockState.from_spec(spec, 10), [4.0])
    assert info.value.kind == "truncation"
    assert info.value.suggested_n_max > 10


def test_suggested_n_max_at_least_doubles():
    spec = poisson_clock()
    dist = tick_number_distribution(ClockState.from_spec(spec, 8))
    assert suggested_n_max(dist, 8) >= 16


def test_evolve_to_times_rejects_unsorted():
    spec = poisson_clock()
    with pytest.raises(ValueError):
        evolve_to_times(spec, ClockState.from_spec(spec, 5), np.array([2.0, 1.0]))


def test_resized_lumps_into_top_bin():
    spec = poisson_clock()
    state = evolve(spec, ClockState.from_spec(spec, 20), 3.0)
    small = state.resized(2)
    assert small.n_max == 2
    assert small.total_trace() == pytest.approx(state.total_trace())
    assert small.probabilities()[2] == pytest.approx(state.probabilities()[2:].sum())
    assert state.resized(25).n_max == 25


def test_general_clock_evolution():
    spec = GeneralClockSpec(
        blocks=(1, 1),
        hamiltonian_blocks=(np.zeros((1, 1)), np.zeros((1, 1))),
        jumps=(GeneralJump(0, 1, 1.5, transition(2, 1, 0)),),
    )
    (rho,) = evolve_general(spec, np.array([1.0]))
    assert rho[0, 0].real == pytest.approx(np.exp(-1.5))
    assert np.trace(rho).real == pytest.approx(1.0)


def test_general_clock_evolution_over_long_gaps():
    spec = GeneralClockSpec(
        blocks=(1, 1),
        hamiltonian_blocks=(np.zeros((1, 1)), np.zeros((1, 1))),
        jumps=(GeneralJump(0, 1, 1.5, transition(2, 1, 0)),),
    )
    early, late = evolve_general(spec, np.array([2.0, 1e5]))
    assert early[0, 0].real == pytest.approx(np.exp(-3.0))
    assert late[1, 1].real == pytest.approx(1.0)
    assert np.trace(late).real == pytest.approx(1.0)


@pytest.mark.parametrize("delta", [0.01, 0.3, 2.0])
@pytest.mark.parametrize(
    "spec",
    [poisson_clock(), erlang_clock(3), coherent_two_level_clock(), branching_clock()],
    ids=["poisson", "erlang3", "coherent", "branching"],
)
def test_clockwork_propagator_is_completely_positive(spec, delta):
    generator = build_generator(spec, 0.0)
    propagator = SuperOperator(spec.dim, matrix_exponential(generator.matrix, delta))
    assert np.min(np.linalg.eigvalsh(choi_matrix(propagator))) > -1e-10
    assert is_completely_positive(propagator)


def test_second_arrival_is_convolution_of_first():
    spec = coherent_two_level_clock()
    h = 0.02
    grid = np.arange(0.0, 15.0 + h / 2, h)
    state0 = ClockState.from_spec(spec, 4)
    first = time_of_arrival_density(spec, state0, 1, grid)
    second = time_of_arrival_density(spec, state0, 2, grid)
    # Trapezoid rule; first[0] == 0 so the endpoint corrections vanish
    convolved = h * np.convolve(first, first)[: grid.size]
    assert first[0] == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(second, convolved, atol=1e-3)
