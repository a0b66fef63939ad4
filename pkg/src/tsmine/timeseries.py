"""Uniformly sampled scalar channel."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .errors import InputError

DEFAULT_START = datetime(2017, 1, 7)
FIVE_MINUTES = 300.0


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A channel of samples on a regular time base.

    ``values`` is stored as a read-only float64 copy so a series can be shared
    between threads without defensive copies.
    """

    values: np.ndarray
    start_time: datetime = DEFAULT_START
    step: float = FIVE_MINUTES
    channel_id: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise InputError(f"time series {self.channel_id!r} is empty")
        if not self.step > 0:
            raise InputError(f"step must be positive, got {self.step}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def with_values(self, values) -> "TimeSeries":
        """Same time base and channel id, new samples."""
        return TimeSeries(values, self.start_time, self.step, self.channel_id)

    def timestamps(self) -> np.ndarray:
        """Sample instants as ``datetime64[s]``."""
        start = np.datetime64(self.start_time.replace(tzinfo=None), "s")
        offsets = np.round(np.arange(len(self)) * self.step).astype("timedelta64[s]")
        return start + offsets

    def same_time_base(self, other: "TimeSeries") -> bool:
        return (
            len(self) == len(other)
            and self.start_time == other.start_time
            and self.step == other.step
        )


def as_values(x) -> np.ndarray:
    """Sample array of a TimeSeries or array-like."""
    if isinstance(x, TimeSeries):
        return x.values
    return np.asarray(x, dtype=np.float64).reshape(-1)
