import numpy as np
import pytest
from scipy import stats

from clock import erlang_clock, poisson_clock
from evolution import ClockState, evolve, tick_number_distribution
from trajectories import (
    TickRecord,
    TickSequence,
    relative_counts,
    sample_joint,
    sample_pair,
    sample_pairs,
    sample_trajectories,
    sample_trajectory,
)
from utils.errors import DataError, UnsupportedError


def test_sampling_is_deterministic_per_seed():
    spec = erlang_clock(2)
    a = sample_trajectory(spec, 20.0, seed=11)
    b = sample_trajectory(spec, 20.0, seed=11)
    c = sample_trajectory(spec, 20.0, seed=12)
    assert a.tick_times == b.tick_times
    assert a.tick_times != c.tick_times


def test_thread_count_does_not_change_results():
    spec = poisson_clock()
    serial = sample_trajectories(spec, 10.0, 6, seed=3, threads=1)
    parallel = sample_trajectories(spec, 10.0, 6, seed=3, threads=3)
    assert [r.tick_times for r in serial] == [r.tick_times for r in parallel]
    assert [r.clock_id for r in serial] == [f"traj-{i}" for i in range(6)]


def test_poisson_mean_gap():
    record = sample_trajectory(poisson_clock(2.0), 400.0, seed=1)
    assert 0.4 < float(np.mean(record.gaps())) < 0.6
    assert all(0.0 <= t <= 400.0 for t in record.tick_times)


def test_erlang_gap_variance_is_below_poisson():
    record = sample_trajectory(erlang_clock(4), 2000.0, seed=5)
    gaps = record.gaps()
    # Erlang(4, 1): mean 4, variance 4
    assert abs(gaps.mean() - 4.0) < 0.45
    assert abs(gaps.var() - 4.0) < 1.7
    assert gaps.var() < 0.5 * gaps.mean() ** 2


def test_tick_record_validation():
    with pytest.raises(ValueError):
        TickRecord("A", (1.0, 1.0), 2.0)
    with pytest.raises(ValueError):
        TickRecord("A", (1.0, 3.0), 2.0)
    record = TickRecord("A", (0.5, 1.5), 2.0)
    assert record.count_at(1.5) == 2
    assert len(record) == 2
    assert record.to_dict() == {"clock_id": "A", "tick_times": [0.5, 1.5], "horizon": 2.0}


def test_merge_orders_ties_a_first():
    seq = TickSequence.merge(TickRecord("x", (1.0, 2.0), 3.0), TickRecord("y", (1.0,), 4.0))
    assert seq.labels() == "ABA"
    assert seq.horizon == 3.0
    assert seq.count("B", 1.5) == 1
    assert seq.count_before_nth(2) == 1
    assert seq.count_before_nth(3) is None
    assert seq.record_of("A").tick_times == (1.0, 2.0)
    assert seq.to_list() == [["A", 1.0], ["B", 1.0], ["A", 2.0]]


def test_sequence_order_enforced():
    with pytest.raises(ValueError):
        TickSequence((("B", 1.0), ("A", 1.0)), 2.0)


def test_relative_counts_of_equal_poisson_clocks():
    spec = poisson_clock()
    seqs = sample_pairs(spec, spec, 15.0, 800, seed=7, threads=2)
    dist = relative_counts(seqs, 1)
    # Competing exponentials: P(m B ticks before the first A tick) = 2^-(m+1)
    assert dist.pmf[0] == pytest.approx(0.5, abs=0.09)
    assert dist.pmf[1] == pytest.approx(0.25, abs=0.08)
    assert dist.pmf.sum() == pytest.approx(1.0)
    assert np.all(dist.lower <= dist.pmf) and np.all(dist.pmf <= dist.upper)
    assert dist.samples == 800


def test_relative_counts_reports_short_sequences():
    seqs = [TickSequence((("A", 1.0),), 2.0), TickSequence((("B", 1.0),), 2.0)]
    with pytest.raises(DataError) as info:
        relative_counts(seqs, 1)
    assert info.value.violations == ["1"]
    with pytest.raises(DataError):
        relative_counts([], 1)
    with pytest.raises(ValueError):
        relative_counts(seqs, 0)


def test_pair_rejects_coupling():
    spec = poisson_clock()
    with pytest.raises(UnsupportedError):
        sample_pair(spec, spec, 5.0, seed=0, coupling=np.ones((1, 1)))
    seq = sample_pair(spec, spec, 5.0, seed=0, coupling=np.zeros((1, 1)))
    assert set(seq.labels()) <= {"A", "B"}


def test_joint_unraveling_labels():
    seq = sample_joint(poisson_clock(), erlang_clock(2), 20.0, seed=2)
    assert set(seq.labels()) <= {"A", "B"}
    assert seq.horizon == 20.0


def _tick_pmf(spec, t, n_max=40):
    state = evolve(spec, ClockState.from_spec(spec, n_max), t)
    return np.asarray(tick_number_distribution(state).probabilities)


def _histogram(counts, size):
    return np.bincount(np.asarray(counts), minlength=size)[:size] / len(counts)


def test_unraveled_counts_match_master_equation():
    spec, t = erlang_clock(3), 15.0
    records = sample_trajectories(spec, t, 4000, seed=21, threads=2)
    expected = _tick_pmf(spec, t)
    observed = _histogram([len(r) for r in records], expected.size)
    assert 0.5 * np.abs(observed - expected).sum() < 0.03


def test_poisson_waiting_times_are_exponential():
    rate = 2.0
    gaps = sample_trajectory(poisson_clock(rate), 1000.0, seed=9).gaps()
    assert stats.kstest(gaps, "expon", args=(0.0, 1.0 / rate)).pvalue > 1e-3


def test_pair_marginals_match_single_clocks():
    spec_a, spec_b, horizon = poisson_clock(), erlang_clock(2), 6.0
    seqs = sample_pairs(spec_a, spec_b, horizon, 3000, seed=13, threads=2)
    for label, spec in (("A", spec_a), ("B", spec_b)):
        expected = _tick_pmf(spec, horizon)
        observed = _histogram([len(s.times_of(label)) for s in seqs], expected.size)
        sigma = np.sqrt(expected * (1 - expected) / len(seqs))
        assert np.all(np.abs(observed - expected) <= 5 * sigma + 1e-3)


def test_first_tick_race_probability():
    seqs = sample_pairs(poisson_clock(1.0), poisson_clock(2.0), 10.0, 3000, seed=17)
    first_a = np.mean([s.labels()[0] == "A" for s in seqs])
    # Exponential race: P(A first) = 1 / (1 + 2)
    assert abs(first_a - 1 / 3) < 5 * np.sqrt((1 / 3) * (2 / 3) / len(seqs))


def test_joint_unraveling_matches_merged_records():
    spec_a, spec_b, horizon, n = poisson_clock(), erlang_clock(2), 3.0, 1500
    merged = [s.labels()[:2] for s in sample_pairs(spec_a, spec_b, horizon, n, seed=19)]
    joint = [sample_joint(spec_a, spec_b, horizon, seed=1000 + i).labels()[:2] for i in range(n)]
    prefixes = sorted(set(merged) | set(joint))
    table = np.array([[merged.count(p) for p in prefixes], [joint.count(p) for p in prefixes]])
    assert stats.chi2_contingency(table).pvalue > 1e-4
