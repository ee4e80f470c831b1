"""
Superoperators on the space of d x d matrices.

Vectorization convention: column stacking. For a d x d matrix X,
`vec(X) = X.flatten(order="F")`, so that `vec(A X B) = (B^T kron A) vec(X)`.
Every superoperator in tickwork is a d^2 x d^2 matrix acting on such vectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg as la

from config import get_tolerances
from numerics.linalg import CMatrix, dagger, require_square
from utils.errors import DegeneracyError, DimensionError, NumericalRankError

logger = logging.getLogger(__name__)


def vec(x: CMatrix) -> np.ndarray:
    """Column-stacks a matrix into a vector."""
    return np.asarray(x, dtype=np.complex128).flatten(order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> CMatrix:
    """Inverse of `vec`."""
    v = np.asarray(v, dtype=np.complex128)
    dim = dim or int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimensionError(f"Vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """
    A linear map on d x d matrices stored as a d^2 x d^2 matrix.

    Attributes:
        dim: Hilbert-space dimension d.
        matrix: The column-stacking representation.
    """
    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        size = self.dim * self.dim
        if self.matrix.shape != (size, size):
            raise DimensionError(
                f"Superoperator on dim {self.dim} needs shape {(size, size)}, got {self.matrix.shape}"
            )

    @classmethod
    def identity(cls, dim: int) -> SuperOperator:
        return cls(dim, np.eye(dim * dim, dtype=np.complex128))

    @classmethod
    def zero(cls, dim: int) -> SuperOperator:
        return cls(dim, np.zeros((dim * dim, dim * dim), dtype=np.complex128))

    def apply(self, x: CMatrix) -> CMatrix:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"Expected a {self.dim}x{self.dim} matrix, got {x.shape}")
        return unvec(self.matrix @ vec(x), self.dim)

    def __call__(self, x: CMatrix) -> CMatrix:
        return self.apply(x)

    def _check_compatible(self, other: SuperOperator) -> None:
        if other.dim != self.dim:
            raise DimensionError(f"Superoperator dims differ: {self.dim} vs {other.dim}")

    def __add__(self, other: SuperOperator) -> SuperOperator:
        self._check_compatible(other)
        return SuperOperator(self.dim, self.matrix + other.matrix)

    def __sub__(self, other: SuperOperator) -> SuperOperator:
        self._check_compatible(other)
        return SuperOperator(self.dim, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> SuperOperator:
        return SuperOperator(self.dim, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other: SuperOperator) -> SuperOperator:
        """Composition: (self @ other)(X) = self(other(X))."""
        self._check_compatible(other)
        return SuperOperator(self.dim, self.matrix @ other.matrix)

    def trace_functional(self) -> np.ndarray:
        """Row vector t with t . vec(X) = Tr[self(X)]."""
        return vec(np.eye(self.dim)) @ self.matrix

    def is_trace_annihilating(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.trace_functional()), initial=0.0) <= tol)

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        residual = self.trace_functional() - vec(np.eye(self.dim))
        return bool(np.max(np.abs(residual), initial=0.0) <= tol)


def spre(a: CMatrix) -> SuperOperator:
    """X -> A X."""
    d = require_square(a)
    return SuperOperator(d, np.kron(np.eye(d), a))


def spost(b: CMatrix) -> SuperOperator:
    """X -> X B."""
    d = require_square(b)
    return SuperOperator(d, np.kron(b.T, np.eye(d)))


def sprepost(a: CMatrix, b: CMatrix) -> SuperOperator:
    """X -> A X B."""
    d = require_square(a)
    return SuperOperator(d, np.kron(b.T, a))


def commutator_generator(hamiltonian: CMatrix) -> SuperOperator:
    """X -> -i [H, X]."""
    return (spre(hamiltonian) - spost(hamiltonian)) * (-1j)


def jump_part(op: CMatrix, rate: float = 1.0) -> SuperOperator:
    """The completely positive part X -> rate * L X L^dagger."""
    return sprepost(op, dagger(op)) * rate


def anticommutator_part(op: CMatrix, rate: float = 1.0) -> SuperOperator:
    """X -> -(rate / 2) {L^dagger L, X}."""
    ldl = dagger(op) @ op
    return (spre(ldl) + spost(ldl)) * (-0.5 * rate)


def lindbladian(hamiltonian: CMatrix, jumps: Iterable[tuple[float, CMatrix]]) -> SuperOperator:
    """
    Builds -i[H, .] + sum_j rate_j D[L_j].

    Args:
        hamiltonian: Hermitian matrix H.
        jumps: Pairs (rate, L).

    Returns:
        The Lindbladian superoperator.
    """
    generator = commutator_generator(np.asarray(hamiltonian, dtype=np.complex128))
    for rate, op in jumps:
        op = np.asarray(op, dtype=np.complex128)
        generator = generator + jump_part(op, rate) + anticommutator_part(op, rate)
    return generator


def kraus_superoperator(kraus_ops: Iterable[CMatrix]) -> SuperOperator:
    """X -> sum_k A_k X A_k^dagger."""
    ops = [np.asarray(a, dtype=np.complex128) for a in kraus_ops]
    d = require_square(ops[0])
    total = SuperOperator.zero(d)
    for a in ops:
        total = total + sprepost(a, dagger(a))
    return total


def choi_matrix(s: SuperOperator) -> CMatrix:
    """
    Returns the Choi matrix sum_ij |i><j| kron S(|i><j|).

    The first tensor factor is the reference system.
    """
    d = s.dim
    t = s.matrix.reshape(d, d, d, d)  # t[b, a, j, i] = S(|i><j|)[a, b]
    return np.transpose(t, (3, 1, 2, 0)).reshape(d * d, d * d)


def is_completely_positive(s: SuperOperator, tol: float = 1e-10) -> bool:
    choi = choi_matrix(s)
    choi = 0.5 * (choi + dagger(choi))
    return bool(np.min(la.eigvalsh(choi)) >= -tol)


def _sorted_spectrum(s: SuperOperator) -> np.ndarray:
    eigenvalues = la.eigvals(s.matrix)
    order = np.argsort(-eigenvalues.real, kind="stable")
    return eigenvalues[order]


def leading_eigenvalue(s: SuperOperator, gap_tol: float | None = None) -> complex:
    """
    Returns the eigenvalue of `s` with the largest real part.

    Args:
        s: The superoperator, typically a tilted generator L(chi).
        gap_tol: Minimum separation in real part from the next eigenvalue.

    Returns:
        The leading eigenvalue.

    Raises:
        DegeneracyError: If the leading eigenvalue is not separated by `gap_tol`.
    """
    gap_tol = get_tolerances().eigen_gap if gap_tol is None else gap_tol
    spectrum = _sorted_spectrum(s)
    if spectrum.size >= 2 and spectrum[0].real - spectrum[1].real <= gap_tol:
        raise DegeneracyError(
            f"Leading eigenvalue {spectrum[0]:.6g} is not separated from {spectrum[1]:.6g}; "
            "the steady state is not unique"
        )
    return complex(spectrum[0])


def spectral_gap(s: SuperOperator) -> float | None:
    """Distance in real part between the two leading eigenvalues, or None for d^2 = 1."""
    spectrum = _sorted_spectrum(s)
    if spectrum.size < 2:
        return None
    return float(spectrum[0].real - spectrum[1].real)


def spectral_abscissa(s: SuperOperator) -> float:
    """Largest real part of the spectrum."""
    return float(np.max(la.eigvals(s.matrix).real))


def null_space(matrix: np.ndarray, rcond: float) -> np.ndarray:
    """Orthonormal null-space basis (columns) with a relative singular-value cut-off."""
    _, singular, vh = la.svd(matrix)
    top = singular.max(initial=0.0)
    cutoff = rcond * top if top > 0 else 0.0
    rank = int(np.sum(singular > cutoff)) if top > 0 else 0
    return vh[rank:].conj().T


def stationary_state(s: SuperOperator, rcond: float | None = None) -> CMatrix:
    """
    Solves L[rho] = 0 for the unique unit-trace steady state.

    Args:
        s: A trace-annihilating generator.
        rcond: Relative singular-value cut-off for the null space.

    Returns:
        The steady state, Hermitian with unit trace.

    Raises:
        DegeneracyError: If the null space is not one-dimensional.
        NumericalRankError: If the null vector is not a valid density operator.
    """
    rcond = get_tolerances().nullspace if rcond is None else rcond
    kernel = null_space(s.matrix, rcond)
    if kernel.shape[1] != 1:
        raise DegeneracyError(
            f"Generator has a {kernel.shape[1]}-dimensional null space; steady state is not unique"
        )
    rho = unvec(kernel[:, 0], s.dim)
    trace = np.trace(rho)
    if abs(trace) < 1e-14:
        raise NumericalRankError("Null vector of the generator is traceless")
    rho = rho / trace
    rho = 0.5 * (rho + dagger(rho))
    if np.min(la.eigvalsh(rho)) < -1e-10:
        raise NumericalRankError("Null vector of the generator is not positive semidefinite")
    logger.debug(f"Stationary state found for dim {s.dim}")
    return rho
