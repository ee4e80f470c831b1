from numerics.linalg import (
    CMatrix,
    as_cmatrix,
    dagger,
    is_density_operator,
    is_hermitian,
    is_psd,
    is_unitary,
    long_time_exponential,
    matrix_exponential,
)
from numerics.rng import RandomStream, child_rng, seeded_rng
from numerics.superop import (
    SuperOperator,
    choi_matrix,
    is_completely_positive,
    leading_eigenvalue,
    lindbladian,
    spectral_abscissa,
    spectral_gap,
    stationary_state,
    unvec,
    vec,
)

__all__ = [
    "CMatrix",
    "RandomStream",
    "SuperOperator",
    "as_cmatrix",
    "child_rng",
    "choi_matrix",
    "dagger",
    "is_completely_positive",
    "is_density_operator",
    "is_hermitian",
    "is_psd",
    "is_unitary",
    "long_time_exponential",
    "leading_eigenvalue",
    "lindbladian",
    "matrix_exponential",
    "seeded_rng",
    "spectral_abscissa",
    "spectral_gap",
    "stationary_state",
    "unvec",
    "vec",
]
