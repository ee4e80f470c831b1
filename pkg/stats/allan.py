"""
Allan variance of a ticking clock.

For a self-timed clock in its steady state the Allan variance at averaging time
tau is Sigma / tau. The trajectory estimator partitions a recorded tick train
into adjacent, non-overlapping bins of length tau and averages the two-sample
variance of the binned tick frequencies.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from stats.fcs import AsymptoticRates
from trajectories.records import TickRecord
from utils.errors import PreconditionError, RecordLengthError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AllanEstimate:
    """
    Attributes:
        tau: Averaging time.
        value: Allan variance.
        stderr: Statistical error; zero for the closed form.
        bins: Number of two-sample terms averaged, None for the closed form.
    """
    tau: float
    value: float
    stderr: float = 0.0
    bins: int | None = None

    def to_dict(self) -> dict[str, float | int | None]:
        return {"tau": self.tau, "value": self.value, "stderr": self.stderr, "bins": self.bins}


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not np.isfinite(tau) or tau <= 0:
        raise PreconditionError(f"Averaging time must be positive, got {tau}")
    return tau


def allan_variance_formula(rates: AsymptoticRates, tau: float) -> AllanEstimate:
    """Closed form Sigma / tau."""
    tau = _check_tau(tau)
    return AllanEstimate(tau, rates.sigma_rate / tau)


def counts_at(record: TickRecord, times: np.ndarray) -> np.ndarray:
    """Number of ticks at or before each time."""
    return np.searchsorted(np.asarray(record.tick_times), times, side="right")


def batch_means_stderr(samples: np.ndarray, batches: int | None = None) -> float:
    """
    Standard error of the mean of correlated samples by batch means.

    Args:
        samples: The sample sequence.
        batches: Number of batches; defaults to floor(sqrt(len(samples))).
    """
    size = samples.size
    if size < 2:
        return 0.0
    batches = batches or max(2, int(math.isqrt(size)))
    batches = min(batches, size)
    width = size // batches
    means = samples[: batches * width].reshape(batches, width).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(batches))


def allan_variance_trajectory(record: TickRecord, tau: float, bins: int) -> AllanEstimate:
    """
    Estimates the Allan variance from one tick record.

    A = (1/M) sum_k (n((k+2)tau) - 2 n((k+1)tau) + n(k tau))^2 / (2 tau^2)
    for k = 0..M-1.

    Args:
        record: The tick record, starting at t = 0.
        tau: Bin length.
        bins: Number M of two-sample terms.

    Returns:
        The estimate with a batch-means standard error.

    Raises:
        RecordLengthError: If the record is shorter than (M + 1) tau.
    """
    tau = _check_tau(tau)
    if bins < 1:
        raise PreconditionError(f"Need at least one bin, got {bins}")
    needed = (bins + 1) * tau
    if record.horizon < needed:
        raise RecordLengthError(
            f"Record of length {record.horizon:.6g} is shorter than (M+1)*tau = {needed:.6g}"
        )
    edges = tau * np.arange(bins + 2)
    counts = counts_at(record, edges).astype(np.float64)
    second_differences = counts[2:] - 2 * counts[1:-1] + counts[:-2]
    terms = second_differences**2 / (2 * tau * tau)
    value = float(terms.mean())
    stderr = batch_means_stderr(terms)
    logger.debug(f"Allan estimate tau={tau:.6g}, M={bins}: {value:.6g} +- {stderr:.3g}")
    return AllanEstimate(tau, value, stderr, bins)
