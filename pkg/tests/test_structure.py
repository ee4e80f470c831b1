import numpy as np
import pytest
from scipy.stats import unitary_group

from clock import erlang_clock
from clock.library import coherent_two_level_clock
from numerics.linalg import projector, transition
from structure import (
    QuantumChannel,
    SWPConfig,
    ZenoConfig,
    ki_decompose,
    load_channel,
    measurement_disturbance,
    minimal_clock,
    swp_demo,
    block_form_state,
    verify_decomposition,
    verify_nondisturbance,
    zeno_experiment,
    zeno_general,
)
from structure.channels import dumps_channel
from structure.swp import angle_basis
from structure.zeno import reading_times
from utils.errors import (
    ClockValidationError,
    DimensionError,
    ShapeError,
    SpecParseError,
    UnsupportedError,
)


def replacement_on_second_factor(omega):
    """1_C (x) (X -> Tr[X] omega) on C^2 (x) C^2."""
    ops = []
    for i, weight in enumerate(np.diag(omega).real):
        for j in range(2):
            ops.append(np.kron(np.eye(2), np.sqrt(weight) * transition(2, i, j)))
    return QuantumChannel(4, tuple(ops))


def test_channel_rejects_incomplete_kraus():
    with pytest.raises(ClockValidationError):
        QuantumChannel(2, (projector(2, 0),))
    with pytest.raises(ClockValidationError):
        QuantumChannel(2, ())
    with pytest.raises(DimensionError):
        QuantumChannel(2, (np.eye(3),))


def test_channel_superoperator_matches_apply():
    channel = QuantumChannel.dephasing(3)
    rho = np.full((3, 3), 1.0 / 3)
    assert np.allclose(channel(rho), np.eye(3) / 3)
    assert np.allclose(channel.superoperator().apply(rho), channel(rho))
    with pytest.raises(DimensionError):
        channel.apply(np.eye(2))


def test_load_channel_fixture(fixture_path):
    channel = load_channel(fixture_path("two_block_channel.json"))
    assert channel.dim == 5
    assert dumps_channel(channel).endswith("\n")


def test_load_channel_errors(fixture_path, tmp_path):
    with pytest.raises(SpecParseError):
        load_channel(fixture_path("malformed.json"))
    with pytest.raises(SpecParseError):
        load_channel(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "kraus": []}', encoding="utf-8")
    with pytest.raises(SpecParseError):
        load_channel(bad)


def test_two_block_decomposition(fixture_path):
    channel = load_channel(fixture_path("two_block_channel.json"))
    decomp = ki_decompose(channel)
    assert decomp.blocks == ((2, 1), (3, 1))
    assert verify_decomposition(channel, decomp).passed(1e-9)
    assert decomp.offsets() == [0, 2, 5]
    projectors = decomp.block_projectors()
    assert np.allclose(projectors[0], np.diag([1, 1, 0, 0, 0]), atol=1e-9)
    assert decomp.to_dict()["blocks"] == [{"c_dim": 2, "f_dim": 1}, {"c_dim": 3, "f_dim": 1}]


def test_replacement_channel_has_nontrivial_f_factor():
    omega = np.diag([0.7, 0.3]).astype(complex)
    channel = replacement_on_second_factor(omega)
    decomp = ki_decompose(channel, seed=4)
    assert decomp.blocks == ((2, 2),)
    assert np.allclose(np.linalg.eigvalsh(decomp.omegas[0]), [0.3, 0.7], atol=1e-9)
    assert len(decomp.kraus_blocks[0]) == 4


@pytest.mark.parametrize("index", range(20))
def test_decomposition_is_covariant_under_unitaries(fixture_path, index):
    channel = load_channel(fixture_path("two_block_channel.json"))
    rotated = channel.conjugated(unitary_group.rvs(5, random_state=index))
    decomp = ki_decompose(rotated, seed=index)
    assert sorted(decomp.blocks) == [(2, 1), (3, 1)]
    assert verify_decomposition(rotated, decomp).passed(1e-9)


def test_identity_channel_is_one_full_block():
    decomp = ki_decompose(QuantumChannel.identity(3))
    assert decomp.blocks == ((3, 1),)


def test_dephasing_channel_splits_into_classical_blocks():
    decomp = ki_decompose(QuantumChannel.dephasing(3))
    assert decomp.blocks == ((1, 1),) * 3


def test_no_full_rank_fixed_state_is_unsupported():
    damping = QuantumChannel(2, (projector(2, 0), transition(2, 0, 1)))
    with pytest.raises(UnsupportedError):
        ki_decompose(damping)


def test_verify_decomposition_dimension_mismatch(fixture_path):
    decomp = ki_decompose(QuantumChannel.identity(2))
    channel = load_channel(fixture_path("two_block_channel.json"))
    with pytest.raises(DimensionError):
        verify_decomposition(channel, decomp)


def test_minimal_clock_round_trip(fixture_path):
    channel = load_channel(fixture_path("two_block_channel.json"))
    decomp = ki_decompose(channel)
    state = block_form_state(decomp, [0.4, 0.6], [np.eye(2) / 2, np.eye(3) / 3])
    assert verify_nondisturbance(channel, [state]) < 1e-9
    reduced = minimal_clock(decomp, [state])
    assert reduced.reduced_dim == 5
    assert reduced.probabilities[0] == pytest.approx([0.4, 0.6])
    assert len(reduced.projectors) == 2


def test_minimal_clock_rejects_block_coherence(fixture_path):
    decomp = ki_decompose(load_channel(fixture_path("two_block_channel.json")))
    coherent = np.full((5, 5), 0.2)
    with pytest.raises(ShapeError):
        minimal_clock(decomp, [coherent])
    with pytest.raises(ShapeError):
        minimal_clock(decomp, [np.eye(2)])
    with pytest.raises(ShapeError):
        block_form_state(decomp, [1.0], [np.eye(2)])


def test_block_measurement_leaves_block_states_alone():
    channel = QuantumChannel.block_measurement([1, 2])
    state = np.diag([0.5, 0.25, 0.25]).astype(complex)
    assert verify_nondisturbance(channel, [state]) == pytest.approx(0.0)
    assert verify_nondisturbance(channel, [np.full((3, 3), 1.0 / 3)]) > 0.1


def test_zeno_survival_matches_closed_form():
    counts = list(range(1, 65))
    points = zeno_experiment(ZenoConfig(rabi_frequency=1.0, total_time=np.pi, measurement_counts=counts))
    assert [p.m for p in points] == counts
    for m, point in zip(counts, points):
        assert point.survival == pytest.approx(point.closed_form, abs=1e-10)
        assert point.closed_form == pytest.approx(np.cos(np.pi / (2 * m)) ** (2 * m), abs=1e-12)


def test_zeno_survival_grows_with_readings():
    points = zeno_experiment(ZenoConfig(rabi_frequency=2.0, total_time=1.5))
    survival = [p.survival for p in points]
    assert survival[1:] == sorted(survival[1:])
    assert survival[-1] > 0.9
    assert points[0].survival == pytest.approx(np.cos(1.5) ** 2, abs=1e-10)
    assert all(p.mean_register == pytest.approx(1.0 - p.final_population) for p in points)


def test_zeno_jittered_schedule_is_seeded():
    cfg = ZenoConfig(
        rabi_frequency=1.0, total_time=1.0, measurement_counts=[8], schedule="jittered", jitter_width=0.05, seed=3
    )
    first = zeno_experiment(cfg)
    assert first[0].survival == zeno_experiment(cfg)[0].survival
    assert first[0].closed_form is None


def test_schedule_parsing():
    assert ZenoConfig.parse_schedule("fixed") == ("fixed", 0.0)
    assert ZenoConfig.parse_schedule("jitter:0.1") == ("jittered", 0.1)
    with pytest.raises(ValueError):
        ZenoConfig.parse_schedule("random")
    with pytest.raises(ValueError):
        ZenoConfig.parse_schedule("jitter:-1")


def test_reading_times():
    assert np.allclose(reading_times(2.0, 4), [0.5, 1.0, 1.5, 2.0])
    assert reading_times(2.0, 0).size == 0
    jittered = reading_times(1.0, 10, "jittered", 0.5)
    assert np.all(np.diff(jittered) >= 0)
    assert jittered.min() >= 0.0 and jittered.max() <= 1.0


def test_zeno_general_checks_inputs():
    h = np.array([[0, 1], [0, 0]], dtype=complex)
    p = [projector(2, 0), projector(2, 1)]
    with pytest.raises(DimensionError):
        zeno_general(h, p, projector(2, 0), 1.0, [1])
    with pytest.raises(DimensionError):
        zeno_general(np.zeros((2, 2)), [projector(2, 0)], projector(2, 0), 1.0, [1])
    with pytest.raises(UnsupportedError):
        zeno_general(np.zeros((17, 17)), [np.eye(17)], np.eye(17) / 17, 1.0, [1])


def test_classical_clock_is_not_disturbed_by_readings():
    residual = measurement_disturbance(erlang_clock(2), 4, np.array([1.0, 2.0]), np.array([0.5, 1.5]))
    assert residual < 1e-10


def test_coherent_clock_register_is_not_disturbed_either():
    spec = coherent_two_level_clock()
    residual = measurement_disturbance(spec, 4, np.array([1.0, 2.0]), np.array([0.3, 0.9, 1.7]))
    assert residual < 1e-10


def test_angle_states_are_shifted_by_free_evolution():
    report = swp_demo(SWPConfig(d=5, alphas=[0.0, 0.5]))
    assert report.overlaps == pytest.approx([1.0] * 5)
    assert max(report.gram_residuals.values()) < 1e-12
    assert max(report.povm_residuals.values()) < 1e-12
    assert all(row["probability"] == pytest.approx(0.5) for row in report.arrivals)
    assert len(report.table) == 2 * 5 * 16 * 5 * 2


def test_angle_basis_is_unitary():
    basis = angle_basis(4, 0.25)
    assert np.allclose(basis.conj().T @ basis, np.eye(4))


def test_swp_config_validation():
    with pytest.raises(ValueError):
        SWPConfig(d=1)
    with pytest.raises(ValueError):
        SWPConfig(d=3, alphas=[1.0])
