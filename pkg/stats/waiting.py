"""
Waiting-time distributions of reset clocks and the precision identity.

For an elementary clock restarted in `reset_state`, the density of the time to
the next tick is the delay function

    omega(t) = Tr[J_+ exp(L_0 t) rho_reset],

where L_0 is the no-tick part of the generator and J_+ the tick part.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.integrate import quad_vec

from clock.model import ClockSpec
from clock.validate import require_elementary
from config import get_tolerances
from evolution.generator import generator_parts, tick_generator
from numerics.linalg import CMatrix, is_density_operator, long_time_exponential
from numerics.superop import SuperOperator, spectral_abscissa, vec
from stats.fcs import AsymptoticRates, fcs_rates
from utils.errors import (
    ClockValidationError,
    DarkStateError,
    IdentityError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

TAIL_MASS = 1e-9
NORMALIZATION_TOL = 1e-6
QUAD_EPSREL = 1e-10
MAX_EXTENSIONS = 24
DEFAULT_GRID_POINTS = 2001


@dataclass(frozen=True, eq=False)
class WaitingTimeDistribution:
    """
    A tabulated delay function with its first two moments.

    Attributes:
        grid: Time points, starting at 0.
        density: omega(t) on the grid.
        survival: Probability of no tick by each grid time.
        mu: Mean waiting time.
        sigma2: Variance of the waiting time.
    """
    grid: np.ndarray
    density: np.ndarray
    survival: np.ndarray
    mu: float
    sigma2: float

    @property
    def r2(self) -> float:
        """Precision R2 = mu^2 / sigma^2."""
        return self.mu**2 / self.sigma2 if self.sigma2 > 0 else math.inf

    def to_dict(self) -> dict[str, float]:
        return {"mu": self.mu, "sigma2": self.sigma2, "r2": self.r2}


class _DelayFunction:
    """Evaluates omega(t) and the survival Tr[exp(L_0 t) rho]."""

    def __init__(self, no_tick: SuperOperator, tick: SuperOperator, rho: CMatrix) -> None:
        self.generator = no_tick.matrix
        self.rho = vec(rho)
        identity = vec(np.eye(no_tick.dim))
        self.tick_row = identity @ tick.matrix
        self.trace_row = identity

    def state(self, t: float) -> np.ndarray:
        return long_time_exponential(self.generator, t) @ self.rho

    def density(self, t: float) -> float:
        return float(np.real(self.tick_row @ self.state(t)))

    def survival(self, t: float) -> float:
        return float(np.real(self.trace_row @ self.state(t)))

    def weighted(self, t: float) -> np.ndarray:
        w = self.density(t)
        return np.array([w, t * w, t * t * w])

    def tabulate(self, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Density and survival on a grid, stepping with one exponential per distinct spacing."""
        state = self.state(float(grid[0]))
        density, survival = [], []
        step, spacing = None, None
        for index, t in enumerate(grid):
            if index:
                h = float(t - grid[index - 1])
                if spacing is None or abs(h - spacing) > 1e-12 * max(h, 1.0):
                    step, spacing = long_time_exponential(self.generator, h), h
                state = step @ state
            density.append(float(np.real(self.tick_row @ state)))
            survival.append(float(np.real(self.trace_row @ state)))
        return np.array(density), np.array(survival)


def _check_reset_state(spec: ClockSpec, reset_state: CMatrix) -> CMatrix:
    rho = np.asarray(reset_state, dtype=np.complex128)
    tol = get_tolerances()
    if rho.shape != (spec.dim, spec.dim) or not is_density_operator(rho, max(tol.psd, tol.trace)):
        raise ClockValidationError.from_violations(
            "reset state", [f"must be a {spec.dim}x{spec.dim} density operator"]
        )
    return rho


def _no_tick_parts(spec: ClockSpec) -> tuple[SuperOperator, SuperOperator]:
    parts = generator_parts(spec)
    return parts[0], tick_generator(spec)


def delay_function_on(
    spec: ClockSpec, reset_state: CMatrix, grid: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Evaluates omega(t) and the no-tick survival on an increasing grid.

    Returns:
        (density, survival) arrays.
    """
    no_tick, tick = _no_tick_parts(spec)
    delay = _DelayFunction(no_tick, tick, _check_reset_state(spec, reset_state))
    return delay.tabulate(np.asarray(grid, dtype=np.float64))


def laplace_moments(spec: ClockSpec, reset_state: CMatrix, order: int = 2) -> np.ndarray:
    """
    Waiting-time moments from powers of the no-tick resolvent.

    int t^k omega(t) dt = k! Tr[J_+ (-L_0)^-(k+1) rho_reset] for k = 0..order.

    Raises:
        DarkStateError: If L_0 is singular.
    """
    no_tick, tick = _no_tick_parts(spec)
    if spectral_abscissa(no_tick) >= -1e-12:
        raise DarkStateError("The no-tick generator has a stationary mode; ticks may never occur")
    rho = vec(_check_reset_state(spec, reset_state))
    tick_row = vec(np.eye(spec.dim)) @ tick.matrix
    minus_l0 = -no_tick.matrix
    moments = []
    current = rho
    for k in range(order + 1):
        current = la.solve(minus_l0, current)
        moments.append(math.factorial(k) * float(np.real(tick_row @ current)))
    return np.array(moments)


def _default_grid(spec: ClockSpec, rho: CMatrix) -> np.ndarray:
    mean = laplace_moments(spec, rho, order=1)[1]
    return np.linspace(0.0, 10.0 * max(mean, 1e-12), DEFAULT_GRID_POINTS)


def _extended_grid(grid: np.ndarray, delay: _DelayFunction) -> np.ndarray:
    for _ in range(MAX_EXTENSIONS):
        if delay.survival(float(grid[-1])) < TAIL_MASS:
            return grid
        spacing = grid[-1] - grid[-2] if grid.size > 1 else max(grid[-1], 1.0)
        extension = grid[-1] + spacing * np.arange(1, grid.size + 1)
        grid = np.concatenate([grid, extension])
        logger.debug(f"Extended waiting-time grid to T={grid[-1]:.6g}")
    raise DarkStateError(
        f"Survival probability still above {TAIL_MASS:.0e} at t={grid[-1]:.6g}; "
        "the no-tick evolution decays too slowly"
    )


def waiting_time(
    spec: ClockSpec, reset_state: CMatrix | None = None, grid: np.ndarray | None = None
) -> WaitingTimeDistribution:
    """
    Tabulates the waiting-time density of an elementary clock.

    Args:
        spec: An elementary clock.
        reset_state: Clockwork state right after a tick; defaults to the
            spec's initial clockwork state.
        grid: Increasing times starting at 0. Extended automatically until the
            survival probability at its end falls below 1e-9.

    Returns:
        The density on the (possibly extended) grid with mean and variance.

    Raises:
        PreconditionError: If the clock is not elementary.
        DarkStateError: If omega is not normalizable.
    """
    require_elementary(spec, "The waiting-time distribution")
    rho = _check_reset_state(spec, spec.initial_clockwork if reset_state is None else reset_state)
    no_tick, tick = _no_tick_parts(spec)
    abscissa = spectral_abscissa(no_tick)
    if abscissa >= -1e-12:
        raise DarkStateError(
            f"No-tick generator has spectral abscissa {abscissa:.3e}; a dark state traps the clockwork"
        )
    delay = _DelayFunction(no_tick, tick, rho)

    grid = _default_grid(spec, rho) if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ValueError("Waiting-time grid must be strictly increasing, non-negative, with >= 2 points")
    grid = _extended_grid(grid, delay)
    end = float(grid[-1])

    inner, _ = quad_vec(delay.weighted, 0.0, end, epsrel=QUAD_EPSREL, epsabs=1e-14)
    # Tail beyond the grid decays at the slowest rate of L_0.
    rate = -abscissa
    w_end = max(delay.density(end), 0.0)
    tail = w_end * np.array([
        1.0 / rate,
        end / rate + 1.0 / rate**2,
        end**2 / rate + 2.0 * end / rate**2 + 2.0 / rate**3,
    ])
    mass, first, second = inner + tail
    if abs(mass - 1.0) > NORMALIZATION_TOL:
        raise DarkStateError(f"Waiting-time density integrates to {mass:.8f}, not 1")
    mu = float(first / mass)
    sigma2 = float(second / mass - mu * mu)

    density, survival = delay.tabulate(grid)
    logger.debug(f"Waiting time: mu={mu:.12g}, sigma2={sigma2:.12g}, T={end:.6g}")
    return WaitingTimeDistribution(grid, density, survival, mu, sigma2)


def reset_state_of(spec: ClockSpec) -> CMatrix:
    """The normalized image J_+[1] of the tick superoperator."""
    tick = tick_generator(spec)
    image = tick.apply(np.eye(spec.dim))
    weight = np.trace(image).real
    if weight <= 0:
        raise PreconditionError("The clock has no ticking jump")
    return image / weight


def is_reset_clock(spec: ClockSpec, reset_state: CMatrix | None = None, tol: float = 1e-10) -> bool:
    """
    Checks that every tick lands in one fixed clockwork state.

    That is, J_+[X] = Tr[J_+ X] rho_reset for every X.
    """
    tick = tick_generator(spec)
    if not np.any(tick.matrix):
        return False
    rho = reset_state_of(spec) if reset_state is None else np.asarray(reset_state, dtype=np.complex128)
    expected = np.outer(vec(rho), tick.trace_functional())
    return bool(np.max(np.abs(tick.matrix - expected)) <= tol)


@dataclass(frozen=True)
class PrecisionReport:
    """Both precision measures of a reset clock and the ratios tying them together."""
    rates: AsymptoticRates
    waiting: WaitingTimeDistribution

    @property
    def r1(self) -> float:
        return self.rates.r1

    @property
    def r2(self) -> float:
        return self.waiting.r2

    @property
    def nu_mu(self) -> float:
        return self.rates.nu * self.waiting.mu

    @property
    def sigma_ratio(self) -> float:
        """Sigma mu^3 / sigma^2."""
        return self.rates.sigma_rate * self.waiting.mu**3 / self.waiting.sigma2

    def violations(self) -> list[str]:
        checks = [
            ("nu*mu", self.nu_mu, 1e-6),
            ("Sigma*mu^3/sigma^2", self.sigma_ratio, 1e-5),
            ("R1/R2", self.r1 / self.r2, 1e-5),
        ]
        return [
            f"{name} = {value:.12g} deviates from 1 by more than {tol:.0e}"
            for name, value, tol in checks
            if not abs(value - 1.0) < tol
        ]

    def to_dict(self) -> dict[str, float]:
        return {
            "R1": self.r1,
            "R2": self.r2,
            "nu_mu": self.nu_mu,
            "sigma_ratio": self.sigma_ratio,
        }


def check_precision_identity(spec: ClockSpec, reset_state: CMatrix | None = None) -> PrecisionReport:
    """
    Compares the counting precision R1 with the waiting-time precision R2.

    Args:
        spec: An elementary reset clock.
        reset_state: The reset state; defaults to the spec's initial state.

    Returns:
        The report with R1, R2, nu*mu and Sigma*mu^3/sigma^2.

    Raises:
        PreconditionError: If the clock is not an elementary reset clock.
        IdentityError: If any ratio misses 1 by more than its tolerance.
    """
    require_elementary(spec, "The precision identity")
    rho = spec.initial_clockwork if reset_state is None else reset_state
    if not is_reset_clock(spec, rho):
        raise PreconditionError("The precision identity holds only for reset clocks")
    report = PrecisionReport(fcs_rates(spec), waiting_time(spec, rho))
    violations = report.violations()
    if violations:
        raise IdentityError(f"Precision identity failed: {'; '.join(violations)}", violations)
    return report
