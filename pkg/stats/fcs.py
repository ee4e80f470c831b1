"""
Asymptotic full counting statistics.

For a clock with a unique steady state the mean and variance of the tick count
grow linearly, <n>_t ~ nu t and Var_t ~ Sigma t. Two independent routes are
provided: derivatives of the leading eigenvalue lambda(chi) of the tilted
generator, and a linear fit of the exact first two moments over a late-time
window.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from clock.model import ClockSpec
from clock.validate import validate_elementary
from evolution.generator import build_generator, generator_parts
from numerics.linalg import long_time_exponential
from numerics.superop import leading_eigenvalue, spectral_gap, stationary_state, vec
from utils.errors import ConsistencyError

logger = logging.getLogger(__name__)

FcsMethod = Literal["eig-derivative", "slope-fit"]

CHI_STEPS = (1e-3, 5e-4)
CONSISTENCY_TOL = 1e-3
AGREEMENT_TOL = 1e-4
WINDOW_GAPS = 25.0
FIT_POINTS = 9


@dataclass(frozen=True)
class AsymptoticRates:
    """
    Linear growth rates of the tick-count cumulants.

    Attributes:
        nu: Mean tick rate.
        sigma_rate: Variance rate Sigma.
        method: How the rates were obtained.
    """
    nu: float
    sigma_rate: float
    method: str = "eig-derivative"

    @property
    def r1(self) -> float:
        """Precision R1 = nu / Sigma, the inverse Fano factor."""
        return self.nu / self.sigma_rate if self.sigma_rate > 0 else math.inf

    def to_dict(self) -> dict[str, float | str]:
        return {"nu": self.nu, "sigma": self.sigma_rate, "r1": self.r1, "method": self.method}


def _central_derivatives(spec: ClockSpec, h: float, lam0: complex) -> tuple[complex, complex]:
    plus = leading_eigenvalue(build_generator(spec, h))
    minus = leading_eigenvalue(build_generator(spec, -h))
    first = (plus - minus) / (2 * h)
    second = (plus - 2 * lam0 + minus) / (h * h)
    return first, second


def _eig_derivative_rates(spec: ClockSpec) -> AsymptoticRates:
    # Differentiate in units of the fastest rate; nu and Sigma scale back linearly.
    scale = spec.max_rate()
    unit = spec.scaled(1.0 / scale) if scale > 0 else spec
    lam0 = leading_eigenvalue(build_generator(unit, 0.0))
    coarse, fine = CHI_STEPS
    d1_coarse, d2_coarse = _central_derivatives(unit, coarse, lam0)
    d1_fine, d2_fine = _central_derivatives(unit, fine, lam0)
    # Richardson extrapolation for O(h^2) central differences.
    ratio = (coarse / fine) ** 2
    d1 = (ratio * d1_fine - d1_coarse) / (ratio - 1)
    d2 = (ratio * d2_fine - d2_coarse) / (ratio - 1)
    factor = scale if scale > 0 else 1.0
    nu = factor * float(np.real(-1j * d1))
    sigma = factor * float(np.real(-d2))
    logger.debug(f"Eigenvalue-derivative rates: nu={nu:.12g}, sigma={sigma:.12g}")
    return AsymptoticRates(nu, sigma, "eig-derivative")


def moment_generator(spec: ClockSpec) -> np.ndarray:
    """
    Generator of the stacked vector (rho, m1, m2) with m_k = sum_n n^k rho_n.

    The hierarchy d/dt m1 = L m1 + K1 rho, d/dt m2 = L m2 + 2 K1 m1 + K2 rho with
    K_k = sum_Delta Delta^k L_Delta is exact for an unbounded register.
    """
    parts = generator_parts(spec)
    size = spec.dim * spec.dim
    total = sum(part.matrix for part in parts.values())
    k1 = sum(delta * part.matrix for delta, part in parts.items())
    k2 = sum(delta * delta * part.matrix for delta, part in parts.items())
    zero = np.zeros((size, size), dtype=np.complex128)
    return np.block([
        [total, zero, zero],
        [k1, total, zero],
        [k2, 2 * k1, total],
    ])


def fit_window(spec: ClockSpec) -> tuple[float, float]:
    """Late-time window [t0, 2 t0] with t0 = 25 / spectral gap."""
    gap = spectral_gap(build_generator(spec, 0.0))
    if gap is None or gap <= 0:
        gap = max(spec.max_rate(), 1e-12)
    t0 = WINDOW_GAPS / gap
    return t0, 2 * t0


def _slope_fit_rates(spec: ClockSpec) -> AsymptoticRates:
    rho = stationary_state(build_generator(spec, 0.0))
    size = spec.dim * spec.dim
    state = np.concatenate([vec(rho), np.zeros(2 * size, dtype=np.complex128)])
    generator = moment_generator(spec)
    identity = vec(np.eye(spec.dim))

    t0, t1 = fit_window(spec)
    times = np.linspace(t0, t1, FIT_POINTS)
    state = long_time_exponential(generator, t0) @ state
    step = long_time_exponential(generator, times[1] - times[0])
    means, variances = [], []
    for index in range(FIT_POINTS):
        if index:
            state = step @ state
        first = float(np.real(identity @ state[size:2 * size]))
        second = float(np.real(identity @ state[2 * size:]))
        means.append(first)
        variances.append(second - first * first)
    nu = float(np.polyfit(times, means, 1)[0])
    sigma = float(np.polyfit(times, variances, 1)[0])
    logger.debug(f"Slope-fit rates over [{t0:.4g}, {t1:.4g}]: nu={nu:.12g}, sigma={sigma:.12g}")
    return AsymptoticRates(nu, sigma, "slope-fit")


def fcs_rates(spec: ClockSpec, method: FcsMethod = "eig-derivative") -> AsymptoticRates:
    """
    Computes the asymptotic mean and variance rates of the tick count.

    Args:
        spec: A clock whose generator has a unique steady state.
        method: "eig-derivative" differentiates the leading eigenvalue of the
            tilted generator; "slope-fit" regresses the exact moments over a
            late-time window.

    Returns:
        The rates nu, Sigma and R1.

    Raises:
        ClockValidationError: If the spec is malformed.
        DegeneracyError: If the steady state is not unique.
    """
    validate_elementary(spec)
    stationary_state(build_generator(spec, 0.0))
    if method == "eig-derivative":
        return _eig_derivative_rates(spec)
    if method == "slope-fit":
        return _slope_fit_rates(spec)
    raise ValueError(f"Unknown FCS method: {method}")


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def cross_validated_rates(spec: ClockSpec) -> AsymptoticRates:
    """
    Runs both FCS methods and returns the eigenvalue-derivative rates.

    Raises:
        ConsistencyError: If the methods disagree by more than 1e-3 relative.
    """
    eig = fcs_rates(spec, "eig-derivative")
    fit = fcs_rates(spec, "slope-fit")
    disagreement = max(_relative(eig.nu, fit.nu), _relative(eig.sigma_rate, fit.sigma_rate))
    if disagreement > CONSISTENCY_TOL:
        raise ConsistencyError(
            f"FCS methods disagree by {disagreement:.3e} relative "
            f"(eig: nu={eig.nu:.8g}, sigma={eig.sigma_rate:.8g}; "
            f"fit: nu={fit.nu:.8g}, sigma={fit.sigma_rate:.8g})"
        )
    if disagreement > AGREEMENT_TOL:
        logger.warning(f"FCS methods agree only to {disagreement:.3e} relative")
    return eig
