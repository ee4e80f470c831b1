"""
Dense complex matrix helpers.

Operators throughout tickwork are plain `numpy` arrays of `complex128`; the
`CMatrix` alias documents that intent. The predicates here are pure and
deterministic so they can be used freely inside validation code.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from utils.errors import ConditioningError, DimensionError

CMatrix = npt.NDArray[np.complex128]

# Norm of scale * m above which the exponential is refused.
MAX_EXPONENT_NORM = 1e4


def as_cmatrix(data: npt.ArrayLike, name: str = "matrix") -> CMatrix:
    """
    Converts array-like data to a 2-D complex matrix.

    Args:
        data: Nested sequences or an array.
        name: Used in the error message.

    Returns:
        A `complex128` array with two dimensions.
    """
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {m.shape}")
    return m


def require_square(m: CMatrix, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


def dagger(m: CMatrix) -> CMatrix:
    return m.conj().T


def is_hermitian(m: CMatrix, tol: float = 1e-12) -> bool:
    """Checks Hermiticity on the max-norm."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def is_psd(m: CMatrix, tol: float = 1e-12) -> bool:
    """Checks that a Hermitian matrix has no eigenvalue below -tol."""
    if not is_hermitian(m, max(tol, 1e-12)):
        return False
    hermitian_part = 0.5 * (m + dagger(m))
    return bool(np.min(la.eigvalsh(hermitian_part)) >= -tol)


def is_unitary(m: CMatrix, tol: float = 1e-12) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    identity = np.eye(m.shape[0])
    return bool(np.max(np.abs(dagger(m) @ m - identity), initial=0.0) <= tol)


def is_density_operator(m: CMatrix, tol: float = 1e-12) -> bool:
    """A density operator is PSD with unit trace."""
    return is_psd(m, tol) and abs(np.trace(m) - 1.0) <= tol


def matrix_exponential(m: CMatrix, scale: float = 1.0) -> CMatrix:
    """
    Computes exp(scale * m).

    Uses scaling-and-squaring with a Pade approximant (`scipy.linalg.expm`).

    Args:
        m: A square complex matrix.
        scale: A finite real factor applied before exponentiation.

    Returns:
        The matrix exponential.

    Raises:
        DimensionError: If `m` is not square.
        ConditioningError: If the scaled matrix has 1-norm above 1e4.
    """
    m = np.asarray(m, dtype=np.complex128)
    require_square(m)
    if not np.isfinite(scale):
        raise ConditioningError(f"Exponential scale must be finite, got {scale}")
    scaled = scale * m
    norm = np.linalg.norm(scaled, 1) if scaled.size else 0.0
    if not np.isfinite(norm) or norm > MAX_EXPONENT_NORM:
        raise ConditioningError(
            f"Norm of scaled matrix is {norm:.3e}, above the limit {MAX_EXPONENT_NORM:.0e}"
        )
    return la.expm(scaled)


def ket(dim: int, index: int) -> CMatrix:
    """Returns the basis column vector |index> of a `dim`-dimensional space."""
    v = np.zeros((dim, 1), dtype=np.complex128)
    v[index, 0] = 1.0
    return v


def projector(dim: int, index: int) -> CMatrix:
    """Returns |index><index|."""
    p = np.zeros((dim, dim), dtype=np.complex128)
    p[index, index] = 1.0
    return p


def transition(dim: int, to: int, frm: int) -> CMatrix:
    """Returns |to><frm|."""
    t = np.zeros((dim, dim), dtype=np.complex128)
    t[to, frm] = 1.0
    return t


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> CMatrix:
    """Draws a density matrix from the induced Hilbert-Schmidt measure."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def random_hermitian(dim: int, rng: np.random.Generator) -> CMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + dagger(g))


def random_unitary(dim: int, rng: np.random.Generator) -> CMatrix:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = la.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def long_time_exponential(m: CMatrix, t: float) -> CMatrix:
    """
    Computes exp(t * m) for a stable generator over arbitrarily long times.

    The exponent is split into 2^s equal pieces that each respect the norm
    limit of `matrix_exponential`, and the result is squared back up.
    """
    m = np.asarray(m, dtype=np.complex128)
    require_square(m)
    norm = float(np.linalg.norm(m, 1)) * abs(t) if m.size else 0.0
    if norm <= MAX_EXPONENT_NORM:
        return matrix_exponential(m, t)
    squarings = int(np.ceil(np.log2(norm / MAX_EXPONENT_NORM))) + 1
    result = matrix_exponential(m, t / 2.0**squarings)
    for _ in range(squarings):
        result = result @ result
    return result
