"""
Block decomposition of the states a channel leaves invariant.

For a channel with a full-rank fixed state the fixed points of the dual
channel form a *-algebra A = (+)_n M(C_n) (x) 1_{F_n}. The center of A
labels the blocks; inside block n the algebra fixes how C_n and F_n split.
In the resulting basis every Kraus operator reads (+)_n 1_{C_n} (x) A_{k,n}
and every invariant state reads (+)_n p_n rho_n (x) omega_n.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from clock.io import encode_matrix
from config import get_tolerances
from numerics.linalg import CMatrix, dagger
from numerics.rng import RandomStream, seeded_rng
from numerics.superop import null_space, unvec, vec
from structure.channels import QuantumChannel
from utils.errors import DimensionError, NumericalRankError, ShapeError, UnsupportedError

logger = logging.getLogger(__name__)

MAX_DIM = 32
FULL_RANK_TOL = 1e-9
# Eigenvalue gaps of a random central element: below TIGHT the levels belong
# to one block, between TIGHT and LOOSE the split is ambiguous and resampled.
TIGHT_GAP = 1e-9
LOOSE_GAP = 1e-8
MAX_ATTEMPTS = 12
SAMPLE_ELEMENTS = 3


@dataclass(frozen=True, eq=False)
class KIDecomposition:
    """
    Block structure of a channel's invariant states.

    Attributes:
        blocks: (dim C_n, dim F_n) per block.
        basis: Unitary whose columns are the block basis, block by block,
            with column c * f_dim + j spanning |c> (x) |j> inside a block.
        omegas: The fixed state omega_n on each F_n.
        kraus_blocks: A_{k,n} for every block n and Kraus index k.
    """
    blocks: tuple[tuple[int, int], ...]
    basis: CMatrix
    omegas: tuple[CMatrix, ...]
    kraus_blocks: tuple[tuple[CMatrix, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.omegas) != len(self.blocks):
            raise ShapeError(f"{len(self.blocks)} blocks but {len(self.omegas)} omegas")
        total = sum(c * f for c, f in self.blocks)
        if self.basis.shape != (total, total):
            raise ShapeError(f"Basis of shape {self.basis.shape} does not match blocks summing to {total}")
        for (c, f), omega in zip(self.blocks, self.omegas):
            if omega.shape != (f, f):
                raise ShapeError(f"omega of shape {omega.shape} does not match f_dim {f}")

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def offsets(self) -> list[int]:
        starts = [0]
        for c, f in self.blocks:
            starts.append(starts[-1] + c * f)
        return starts

    def block_slice(self, n: int) -> slice:
        starts = self.offsets()
        return slice(starts[n], starts[n + 1])

    def to_block_basis(self, x: CMatrix) -> CMatrix:
        return dagger(self.basis) @ np.asarray(x, dtype=np.complex128) @ self.basis

    def from_block_basis(self, x: CMatrix) -> CMatrix:
        return self.basis @ np.asarray(x, dtype=np.complex128) @ dagger(self.basis)

    def block_projectors(self) -> list[CMatrix]:
        """Projectors onto each block in the computational basis."""
        projectors = []
        for n in range(len(self.blocks)):
            columns = self.basis[:, self.block_slice(n)]
            projectors.append(columns @ dagger(columns))
        return projectors

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "blocks": [{"c_dim": c, "f_dim": f} for c, f in self.blocks],
            "omegas": [encode_matrix(omega) for omega in self.omegas],
        }


def _partial_trace_c(block: CMatrix, c: int, f: int) -> CMatrix:
    """Tr_C of a (c f) x (c f) matrix ordered as C (x) F."""
    return np.einsum("ijik->jk", block.reshape(c, f, c, f))


def _partial_trace_f(block: CMatrix, c: int, f: int) -> CMatrix:
    return np.einsum("ijkj->ik", block.reshape(c, f, c, f))


def _hermitian_basis(matrices: list[CMatrix], rcond: float) -> list[CMatrix]:
    """
    Orthonormal Hermitian basis of the span of `matrices` and their adjoints.

    The span of a *-closed set of m x m matrices has complex dimension equal
    to the real dimension of its Hermitian part, which is what this returns.
    """
    if not matrices:
        return []
    size = matrices[0].shape[0]
    rows = []
    for x in matrices:
        for h in (0.5 * (x + dagger(x)), (x - dagger(x)) / 2j):
            rows.append(np.concatenate([h.real.ravel(), h.imag.ravel()]))
    _, singular, vh = la.svd(np.array(rows), full_matrices=False)
    top = singular.max(initial=0.0)
    if top == 0.0:
        return []
    rank = int(np.sum(singular > rcond * top))
    basis = []
    for v in vh[:rank]:
        h = (v[: size * size] + 1j * v[size * size:]).reshape(size, size)
        basis.append(0.5 * (h + dagger(h)))
    return basis


def _random_element(basis: list[CMatrix], rng: RandomStream) -> CMatrix:
    weights = rng.normal(size=len(basis))
    element = sum(w * h for w, h in zip(weights, basis))
    return element / max(float(np.linalg.norm(element)), 1e-300)


def _clusters(values: np.ndarray) -> list[np.ndarray] | None:
    """Index groups of (sorted) eigenvalues, or None if a gap is ambiguous."""
    scale = max(float(np.max(np.abs(values), initial=0.0)), 1.0)
    gaps = np.diff(values)
    if np.any((gaps > TIGHT_GAP * scale) & (gaps < LOOSE_GAP * scale)):
        return None
    cuts = np.where(gaps > TIGHT_GAP * scale)[0] + 1
    return np.split(np.arange(len(values)), cuts)


def fixed_state(channel: QuantumChannel) -> CMatrix:
    """
    The projection of the maximally mixed state onto the fixed points of the channel.

    Its support is the largest support of any fixed state, so it is full rank
    exactly when the channel has a full-rank fixed state.
    """
    d = channel.dim
    rcond = get_tolerances().nullspace
    shifted = channel.superoperator().matrix - np.eye(d * d)
    right = null_space(shifted, rcond)
    left = null_space(dagger(shifted), rcond)
    if right.shape[1] == 0 or right.shape[1] != left.shape[1]:
        raise NumericalRankError(
            f"Fixed-point space has inconsistent dimensions {right.shape[1]} and {left.shape[1]}"
        )
    overlap = dagger(left) @ right
    projection = right @ la.solve(overlap, dagger(left) @ vec(np.eye(d) / d))
    rho = unvec(projection, d)
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real


def fixed_algebra(channel: QuantumChannel) -> list[CMatrix]:
    """Hermitian basis of {X : E^dagger(X) = X}."""
    d = channel.dim
    rcond = get_tolerances().nullspace
    shifted = channel.dual_superoperator().matrix - np.eye(d * d)
    kernel = null_space(shifted, rcond)
    return _hermitian_basis([unvec(kernel[:, i], d) for i in range(kernel.shape[1])], rcond)


def algebra_center(algebra: list[CMatrix], rng: RandomStream) -> list[CMatrix]:
    """Hermitian basis of the elements of the algebra commuting with a few random elements of it."""
    rcond = get_tolerances().nullspace
    samples = [_random_element(algebra, rng) for _ in range(SAMPLE_ELEMENTS)]
    columns = []
    for h in algebra:
        parts = []
        for sample in samples:
            c = h @ sample - sample @ h
            parts.extend([c.real.ravel(), c.imag.ravel()])
        columns.append(np.concatenate(parts))
    system = np.array(columns).T
    kernel = null_space(system, rcond).real
    center = [sum(w * h for w, h in zip(kernel[:, i], algebra)) for i in range(kernel.shape[1])]
    return _hermitian_basis(center, rcond)


def _split_center(center: list[CMatrix], rng: RandomStream) -> list[CMatrix]:
    """Orthonormal bases (columns) of the minimal central projections."""
    for attempt in range(MAX_ATTEMPTS):
        values, vectors = la.eigh(_random_element(center, rng))
        groups = _clusters(values)
        if groups is not None and len(groups) == len(center):
            return [vectors[:, g] for g in groups]
        logger.debug(f"Central element split ambiguous on attempt {attempt + 1}; resampling")
    raise NumericalRankError(f"Could not separate {len(center)} blocks after {MAX_ATTEMPTS} attempts")


def _block_frame(
    restricted: list[CMatrix], size: int, rng: RandomStream
) -> tuple[int, int, CMatrix]:
    """
    Finds the C (x) F frame of one block.

    Args:
        restricted: Hermitian basis of the algebra compressed to the block.
        size: Block dimension.
        rng: Stream for the random sample elements.

    Returns:
        (c_dim, f_dim, frame) with frame a size x size unitary whose column
        i * f_dim + j is |i> (x) |j>.
    """
    c = int(round(np.sqrt(len(restricted))))
    if c * c != len(restricted) or size % c:
        raise NumericalRankError(
            f"Block of dimension {size} carries an algebra of dimension {len(restricted)}, not c^2 with c | {size}"
        )
    f = size // c
    if c == 1:
        return c, f, np.eye(size, dtype=np.complex128)
    for attempt in range(MAX_ATTEMPTS):
        values, vectors = la.eigh(_random_element(restricted, rng))
        groups = _clusters(values)
        if groups is None or len(groups) != c or any(len(g) != f for g in groups):
            logger.debug(f"Block split ambiguous on attempt {attempt + 1}; resampling")
            continue
        spaces = [vectors[:, g] for g in groups]
        linker = _random_element(restricted, rng)
        aligned = [spaces[0]]
        for space in spaces[1:]:
            link = dagger(space) @ linker @ spaces[0]
            scale = float(np.linalg.norm(link)) / np.sqrt(f)
            if scale < 1e-6:
                break
            aligned.append(space @ (link / scale))
        if len(aligned) == c:
            return c, f, np.hstack(aligned)
    raise NumericalRankError(f"Could not resolve the C (x) F split of a block of dimension {size}")


def _kraus_blocks(
    channel: QuantumChannel, blocks: list[tuple[int, int]], basis: CMatrix
) -> tuple[tuple[tuple[CMatrix, ...], ...], float]:
    """A_{k,n} read off by partial trace, and the residual of the block form."""
    starts = np.cumsum([0] + [c * f for c, f in blocks])
    per_block: list[list[CMatrix]] = [[] for _ in blocks]
    residual = 0.0
    for a in channel.kraus_ops:
        rotated = dagger(basis) @ a @ basis
        rebuilt = np.zeros_like(rotated)
        for n, (c, f) in enumerate(blocks):
            window = slice(starts[n], starts[n + 1])
            a_n = _partial_trace_c(rotated[window, window], c, f) / c
            per_block[n].append(a_n)
            rebuilt[window, window] = np.kron(np.eye(c), a_n)
        residual = max(residual, float(np.max(np.abs(rotated - rebuilt), initial=0.0)))
    return tuple(tuple(ops) for ops in per_block), residual


@dataclass(frozen=True)
class DecompositionCheck:
    """
    Residuals of a decomposition against a channel.

    Attributes:
        kraus_residual: Largest entry of W^dagger A_k W minus its block form.
        omega_residual: Largest entry of sum_k A_{k,n} omega_n A_{k,n}^dagger - omega_n.
    """
    kraus_residual: float
    omega_residual: float

    def passed(self, tol: float) -> bool:
        return self.kraus_residual <= tol and self.omega_residual <= tol

    def to_dict(self) -> dict[str, float]:
        return {"kraus_residual": self.kraus_residual, "omega_residual": self.omega_residual}


def verify_decomposition(channel: QuantumChannel, decomp: KIDecomposition) -> DecompositionCheck:
    """
    Checks a decomposition against a channel without rediscovering it.

    This also works for channels with no full-rank fixed state, where the
    decomposition has to be supplied by the caller.

    Raises:
        DimensionError: If the decomposition has a different dimension.
    """
    if decomp.dim != channel.dim:
        raise DimensionError(f"Decomposition of dim {decomp.dim} does not match channel dim {channel.dim}")
    kraus, kraus_residual = _kraus_blocks(channel, list(decomp.blocks), decomp.basis)
    omega_residual = 0.0
    for ops, omega in zip(kraus, decomp.omegas):
        image = sum(a @ omega @ dagger(a) for a in ops)
        omega_residual = max(omega_residual, float(np.max(np.abs(image - omega), initial=0.0)))
    check = DecompositionCheck(kraus_residual, omega_residual)
    logger.debug(f"Decomposition check: {check.to_dict()}")
    return check


def ki_decompose(channel: QuantumChannel, seed: int = 0) -> KIDecomposition:
    """
    Discovers the block structure of the states a channel leaves invariant.

    Args:
        channel: A channel of dimension at most 32 with a full-rank fixed state.
        seed: Seed of the random algebra elements used to split blocks.

    Returns:
        The decomposition, blocks sorted by (c_dim, f_dim, block-projector diagonal).

    Raises:
        UnsupportedError: If the dimension is too large or no fixed state is full rank.
        NumericalRankError: If a split is ambiguous or the result misses the tolerance.
    """
    d = channel.dim
    if d > MAX_DIM:
        raise UnsupportedError(f"Channels above dimension {MAX_DIM} are not supported, got {d}")
    rng = seeded_rng(seed)
    rho = fixed_state(channel)
    smallest = float(np.min(la.eigvalsh(rho)))
    if smallest < FULL_RANK_TOL / d:
        raise UnsupportedError(
            f"Channel has no full-rank fixed state (smallest eigenvalue {smallest:.3e}); "
            "supply a decomposition and use verify_decomposition instead"
        )
    algebra = fixed_algebra(channel)
    center = algebra_center(algebra, rng)
    logger.info(f"Fixed-point algebra of dimension {len(algebra)} with {len(center)}-dimensional center")

    found = []
    for space in _split_center(center, rng):
        restricted = _hermitian_basis([dagger(space) @ h @ space for h in algebra], get_tolerances().nullspace)
        c, f, frame = _block_frame(restricted, space.shape[1], rng)
        columns = space @ frame
        fingerprint = tuple(np.round(np.real(np.diag(space @ dagger(space))), 8))
        found.append(((c, f, tuple(-x for x in fingerprint)), c, f, columns))
    found.sort(key=lambda item: item[0])

    blocks = [(c, f) for _, c, f, _ in found]
    basis = np.hstack([columns for *_, columns in found])
    rotated = dagger(basis) @ rho @ basis
    starts = np.cumsum([0] + [c * f for c, f in blocks])
    omegas = []
    for n, (c, f) in enumerate(blocks):
        window = slice(starts[n], starts[n + 1])
        omega = _partial_trace_c(rotated[window, window], c, f)
        omega = 0.5 * (omega + dagger(omega))
        omegas.append(omega / np.trace(omega).real)

    kraus, _ = _kraus_blocks(channel, blocks, basis)
    decomp = KIDecomposition(tuple(blocks), basis, tuple(omegas), kraus)
    check = verify_decomposition(channel, decomp)
    if not check.passed(get_tolerances().structure):
        raise NumericalRankError(
            f"Recovered decomposition misses the tolerance: kraus {check.kraus_residual:.3e}, "
            f"omega {check.omega_residual:.3e}"
        )
    logger.info(f"Channel of dim {d} decomposed into blocks {blocks}")
    return decomp


@dataclass(frozen=True, eq=False)
class MinimalClock:
    """
    A clock with every F_n traced out.

    Attributes:
        blocks: (dim C_n, dim F_n) of the original decomposition.
        states: Reduced states (+)_n p_n rho_n on (+)_n C_n.
        projectors: Reduced projectors, one per block.
        probabilities: probabilities[t, n] = p_{n|t}.
        residual: Largest entry of R(S(rho_t)) - rho_t over the inputs.
    """
    blocks: tuple[tuple[int, int], ...]
    states: tuple[CMatrix, ...]
    projectors: tuple[CMatrix, ...]
    probabilities: np.ndarray
    residual: float

    @property
    def reduced_dim(self) -> int:
        return sum(c for c, _ in self.blocks)


def minimal_clock(decomp: KIDecomposition, states: list[CMatrix]) -> MinimalClock:
    """
    Traces out each F_n and checks that re-attaching omega_n restores every state.

    Raises:
        ShapeError: If a state has the wrong shape or is not of the form
            (+)_n p_n rho_n (x) omega_n in the decomposition's basis.
    """
    tol = get_tolerances().structure
    starts = decomp.offsets()
    c_starts = np.cumsum([0] + [c for c, _ in decomp.blocks])
    reduced_dim = int(c_starts[-1])
    reduced_states, probabilities = [], []
    residual = 0.0
    for index, rho in enumerate(states):
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (decomp.dim, decomp.dim):
            raise ShapeError(f"State {index} has shape {rho.shape}, expected {(decomp.dim, decomp.dim)}")
        rotated = decomp.to_block_basis(rho)
        reduced = np.zeros((reduced_dim, reduced_dim), dtype=np.complex128)
        rebuilt = np.zeros_like(rotated)
        weights = []
        for n, ((c, f), omega) in enumerate(zip(decomp.blocks, decomp.omegas)):
            window = slice(starts[n], starts[n + 1])
            sigma = _partial_trace_f(rotated[window, window], c, f)
            reduced[c_starts[n]:c_starts[n + 1], c_starts[n]:c_starts[n + 1]] = sigma
            rebuilt[window, window] = np.kron(sigma, omega)
            weights.append(float(np.trace(sigma).real))
        error = float(np.max(np.abs(rebuilt - rotated), initial=0.0))
        if error > tol:
            raise ShapeError(f"State {index} is not compatible with the decomposition (round-trip error {error:.3e})")
        residual = max(residual, error)
        reduced_states.append(reduced)
        probabilities.append(weights)
    projectors = []
    for n in range(len(decomp.blocks)):
        p = np.zeros((reduced_dim, reduced_dim), dtype=np.complex128)
        p[c_starts[n]:c_starts[n + 1], c_starts[n]:c_starts[n + 1]] = np.eye(c_starts[n + 1] - c_starts[n])
        projectors.append(p)
    logger.debug(f"Reduced {len(states)} states from dim {decomp.dim} to {reduced_dim}")
    return MinimalClock(
        decomp.blocks, tuple(reduced_states), tuple(projectors), np.array(probabilities).reshape(len(states), -1), residual
    )


def block_form_state(decomp: KIDecomposition, weights: list[float], rhos: list[CMatrix]) -> CMatrix:
    """Assembles W ((+)_n p_n rho_n (x) omega_n) W^dagger in the computational basis."""
    if len(weights) != len(decomp.blocks) or len(rhos) != len(decomp.blocks):
        raise ShapeError("Need one weight and one C_n state per block")
    starts = decomp.offsets()
    block = np.zeros((decomp.dim, decomp.dim), dtype=np.complex128)
    for n, (p, sigma, omega) in enumerate(zip(weights, rhos, decomp.omegas)):
        window = slice(starts[n], starts[n + 1])
        block[window, window] = p * np.kron(sigma, omega)
    return decomp.from_block_basis(block)
