import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from config import use_tolerances
from numerics import (
    SuperOperator,
    choi_matrix,
    is_completely_positive,
    is_density_operator,
    leading_eigenvalue,
    lindbladian,
    matrix_exponential,
    seeded_rng,
    spectral_gap,
    stationary_state,
    unvec,
    vec,
)
from numerics.linalg import projector, random_density_matrix, transition
from numerics.rng import child_rng
from numerics.superop import kraus_superoperator, sprepost
from utils.errors import ConditioningError, DegeneracyError, DimensionError


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**32))
def test_vec_unvec_inverse(dim, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    assert np.allclose(unvec(vec(x)), x)


def test_vec_is_column_stacking():
    x = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.allclose(vec(x), [1, 3, 2, 4])


def test_unvec_rejects_non_square_length():
    with pytest.raises(DimensionError):
        unvec(np.zeros(5))


def test_sprepost_matches_direct_product():
    rng = np.random.default_rng(3)
    a, b, x = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(sprepost(a, b).apply(x), a @ x @ b)


def test_superoperator_shape_checked():
    with pytest.raises(DimensionError):
        SuperOperator(2, np.eye(3))


def test_superoperator_algebra():
    s = SuperOperator.identity(2)
    doubled = s + s
    assert np.allclose(doubled.matrix, 2 * np.eye(4))
    assert np.allclose((doubled - s).matrix, np.eye(4))
    assert np.allclose((s @ doubled).matrix, (s * 2.0).matrix)


def test_amplitude_damping_lindbladian_is_trace_annihilating():
    gen = lindbladian(np.zeros((2, 2)), [(0.7, transition(2, 0, 1))])
    assert gen.is_trace_annihilating()
    rho = stationary_state(gen)
    assert np.allclose(rho, projector(2, 0), atol=1e-10)


def test_stationary_state_rejects_degenerate_kernel():
    dephasing = lindbladian(np.zeros((2, 2)), [(1.0, np.diag([1.0, -1.0]))])
    with pytest.raises(DegeneracyError):
        stationary_state(dephasing)


def test_leading_eigenvalue_degeneracy():
    dephasing = lindbladian(np.zeros((2, 2)), [(1.0, np.diag([1.0, -1.0]))])
    with pytest.raises(DegeneracyError):
        leading_eigenvalue(dephasing)


def test_leading_eigenvalue_of_decay_is_zero():
    gen = lindbladian(np.zeros((2, 2)), [(1.0, transition(2, 0, 1))])
    assert leading_eigenvalue(gen) == pytest.approx(0.0, abs=1e-12)
    assert spectral_gap(gen) == pytest.approx(0.5, abs=1e-10)


def test_kraus_channel_is_completely_positive():
    gamma = 0.3
    k0 = np.diag([1.0, np.sqrt(1 - gamma)])
    k1 = np.sqrt(gamma) * transition(2, 0, 1)
    channel = kraus_superoperator([k0, k1])
    assert channel.is_trace_preserving()
    assert is_completely_positive(channel)
    assert np.allclose(choi_matrix(channel), choi_matrix(channel).conj().T)


def test_transpose_is_not_completely_positive():
    perm = np.zeros((4, 4))
    # vec(X^T) permutes indices (i, j) -> (j, i)
    for i in range(2):
        for j in range(2):
            perm[j * 2 + i, i * 2 + j] = 1.0
    assert not is_completely_positive(SuperOperator(2, perm.astype(complex)))


def test_matrix_exponential_of_diagonal():
    m = np.diag([1.0, -2.0]).astype(complex)
    assert np.allclose(matrix_exponential(m, 0.5), np.diag(np.exp([0.5, -1.0])))


def test_matrix_exponential_refuses_large_norm():
    with pytest.raises(ConditioningError):
        matrix_exponential(np.eye(2, dtype=complex), 1e5)
    with pytest.raises(DimensionError):
        matrix_exponential(np.zeros((2, 3)))


def test_random_density_matrix_is_valid():
    rho = random_density_matrix(4, np.random.default_rng(0))
    assert is_density_operator(rho, 1e-10)


def test_seeded_streams_are_reproducible():
    assert seeded_rng(5).random() == seeded_rng(5).random()
    assert child_rng(5, 1).random() == child_rng(5, 1).random()
    assert child_rng(5, 1).random() != child_rng(5, 2).random()


@settings(max_examples=20)
@given(st.floats(min_value=1e-6, max_value=1e-2))
def test_tolerance_override_is_scoped(value):
    from config import get_tolerances

    before = get_tolerances().trace
    with use_tolerances(trace=value):
        assert get_tolerances().trace == value
    assert get_tolerances().trace == before
