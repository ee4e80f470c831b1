"""
The finite-dimensional clock with an equally spaced spectrum.

With H = sum_n n omega |n><n| the angle states theta_k are carried into one
another every 2 pi / (omega d). Shifting the angle index by alpha gives a
second orthonormal basis lambda_k(alpha) whose states the clockwork passes
at the intermediate times 2 pi (l + alpha) / (omega d), so a readout that
mixes both bases resolves times between the ticks of the first.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from numerics.linalg import CMatrix, dagger

logger = logging.getLogger(__name__)


class SWPConfig(BaseModel):
    """
    Attributes:
        d: Clockwork dimension.
        omega: Level spacing.
        alphas: Shifts of the second basis, each in [0, 1).
        time_points: Samples per period in the outcome table.
    """
    model_config = ConfigDict(extra="forbid")

    d: int = Field(ge=2)
    omega: float = Field(1.0, gt=0, allow_inf_nan=False)
    alphas: list[float] = Field(default_factory=lambda: [0.5])
    time_points: int = Field(16, ge=1)

    @field_validator("alphas")
    @classmethod
    def _in_unit_interval(cls, alphas: list[float]) -> list[float]:
        if any(not 0.0 <= a < 1.0 for a in alphas):
            raise ValueError("every alpha must lie in [0, 1)")
        return alphas


def angle_basis(d: int, shift: float = 0.0) -> CMatrix:
    """Columns are the states (1/sqrt d) sum_n exp(-2 pi i n (k + shift) / d) |n>, k = 0..d-1."""
    n = np.arange(d)[:, None]
    k = np.arange(d)[None, :]
    return np.exp(-2j * np.pi * n * (k + shift) / d) / np.sqrt(d)


def evolution(d: int, omega: float, t: float) -> CMatrix:
    return np.diag(np.exp(-1j * omega * np.arange(d) * t))


@dataclass
class SWPReport:
    """
    Attributes:
        d: Clockwork dimension.
        omega: Level spacing.
        overlaps: |<theta_{k+1}| U(2 pi / (omega d)) |theta_k>| per k.
        gram_residuals: alpha -> largest entry of Lambda^dagger Lambda - 1.
        povm_residuals: alpha -> largest entry of the 2d POVM elements summed minus 1.
        arrivals: One row per shifted state with its arrival time and outcome probability there.
        table: Long-format outcome probabilities of U(t) theta_0 over one period.
    """
    d: int
    omega: float
    overlaps: list[float]
    gram_residuals: dict[float, float]
    povm_residuals: dict[float, float]
    arrivals: list[dict] = field(default_factory=list)
    table: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "omega": self.omega,
            "overlaps": self.overlaps,
            "gram_residuals": [{"alpha": a, "residual": r} for a, r in self.gram_residuals.items()],
            "povm_residuals": [{"alpha": a, "residual": r} for a, r in self.povm_residuals.items()],
            "arrivals": self.arrivals,
            "table": self.table,
        }


def outcome_probabilities(state: np.ndarray, theta: CMatrix, lam: CMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities of the POVM elements 1/2 |theta_k><theta_k| and 1/2 |lambda_l><lambda_l|."""
    return 0.5 * np.abs(dagger(theta) @ state) ** 2, 0.5 * np.abs(dagger(lam) @ state) ** 2


def swp_demo(cfg: SWPConfig) -> SWPReport:
    d, omega = cfg.d, cfg.omega
    theta = angle_basis(d)
    step = evolution(d, omega, 2 * np.pi / (omega * d))
    overlaps = [float(abs(theta[:, (k + 1) % d].conj() @ step @ theta[:, k])) for k in range(d)]
    identity = np.eye(d)

    gram, povm, arrivals, table = {}, {}, [], []
    period = 2 * np.pi / omega
    grid = period * np.arange(cfg.time_points * d) / (cfg.time_points * d)
    for alpha in cfg.alphas:
        lam = angle_basis(d, alpha)
        gram[alpha] = float(np.max(np.abs(dagger(lam) @ lam - identity)))
        total = 0.5 * theta @ dagger(theta) + 0.5 * lam @ dagger(lam)
        povm[alpha] = float(np.max(np.abs(total - identity)))
        for l in range(d):
            t = 2 * np.pi * (l + alpha) / (omega * d)
            _, p_lam = outcome_probabilities(evolution(d, omega, t) @ theta[:, 0], theta, lam)
            arrivals.append({"alpha": alpha, "index": l, "time": t, "probability": float(p_lam[l])})
        for t in grid:
            p_theta, p_lam = outcome_probabilities(evolution(d, omega, t) @ theta[:, 0], theta, lam)
            for k in range(d):
                table.append({"alpha": alpha, "time": float(t), "outcome": "theta", "index": k, "probability": float(p_theta[k])})
                table.append({"alpha": alpha, "time": float(t), "outcome": "lambda", "index": k, "probability": float(p_lam[k])})
    logger.debug(f"Angle-state demo for d={d}, alphas={cfg.alphas}")
    return SWPReport(d, omega, overlaps, gram, povm, arrivals, table)
