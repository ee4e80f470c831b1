"""
Tick records of single clocks and tick sequences of clock pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

Label = Literal["A", "B"]
LABELS: tuple[Label, Label] = ("A", "B")


@dataclass(frozen=True)
class TickRecord:
    """
    Arrival times of the ticks of one clock.

    Attributes:
        clock_id: Identifier of the clock (or trajectory).
        tick_times: Strictly increasing arrival times T_1 < T_2 < ...
        horizon: End of the simulated window; every tick time is <= horizon.
    """
    clock_id: str
    tick_times: tuple[float, ...]
    horizon: float

    def __post_init__(self) -> None:
        times = tuple(float(t) for t in self.tick_times)
        object.__setattr__(self, "tick_times", times)
        object.__setattr__(self, "horizon", float(self.horizon))
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"Tick times of {self.clock_id} are not strictly increasing")
        if times and (times[0] < 0 or times[-1] > self.horizon):
            raise ValueError(f"Tick times of {self.clock_id} leave the window [0, {self.horizon}]")

    def __len__(self) -> int:
        return len(self.tick_times)

    def count_at(self, t: float) -> int:
        """Number of ticks at or before `t`."""
        return int(np.searchsorted(self.tick_times, t, side="right"))

    def gaps(self) -> np.ndarray:
        """Inter-tick intervals, the first measured from t = 0."""
        return np.diff(np.concatenate([[0.0], self.tick_times]))

    def to_dict(self) -> dict:
        return {"clock_id": self.clock_id, "tick_times": list(self.tick_times), "horizon": self.horizon}


@dataclass(frozen=True)
class TickSequence:
    """
    Labels and times of ticks written to a shared write-once register.

    Entries are ordered by time; simultaneous ticks are ordered A before B.

    Attributes:
        entries: (label, time) pairs.
        horizon: End of the simulated window.
    """
    entries: tuple[tuple[Label, float], ...]
    horizon: float

    def __post_init__(self) -> None:
        entries = tuple((label, float(t)) for label, t in self.entries)
        object.__setattr__(self, "entries", entries)
        keys = [(t, LABELS.index(label)) for label, t in entries]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise ValueError("Tick sequence entries are not in (time, label) order")

    @classmethod
    def merge(cls, record_a: TickRecord, record_b: TickRecord) -> TickSequence:
        """Time-ordered merge of two records; ties resolve to A first."""
        tagged = [(t, 0, "A") for t in record_a.tick_times] + [(t, 1, "B") for t in record_b.tick_times]
        tagged.sort()
        return cls(
            tuple((label, t) for t, _, label in tagged),
            min(record_a.horizon, record_b.horizon),
        )

    def __len__(self) -> int:
        return len(self.entries)

    def labels(self) -> str:
        return "".join(label for label, _ in self.entries)

    def times_of(self, label: Label) -> tuple[float, ...]:
        """The per-clock subsequence of arrival times."""
        return tuple(t for entry_label, t in self.entries if entry_label == label)

    def record_of(self, label: Label) -> TickRecord:
        return TickRecord(label, self.times_of(label), self.horizon)

    def count(self, label: Label, t: float) -> int:
        """N_label(t), the ticks of `label` at or before `t`."""
        return sum(1 for entry_label, time in self.entries if entry_label == label and time <= t)

    def count_before_nth(self, n: int, label: Label = "A", other: Label = "B") -> int | None:
        """
        Ticks of `other` written before the n-th tick of `label`.

        Returns:
            The count, or None if `label` never ticks n times.
        """
        seen = 0
        others = 0
        for entry_label, _ in self.entries:
            if entry_label == label:
                seen += 1
                if seen == n:
                    return others
            elif entry_label == other:
                others += 1
        return None

    def to_list(self) -> list[list[str | float]]:
        return [[label, t] for label, t in self.entries]
