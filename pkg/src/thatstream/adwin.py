"""Adaptive windowing (ADWIN) change detection.

Two detectors share one contract. :class:`Adwin` keeps an exponential
histogram of buckets and only tests cuts at bucket boundaries, using
O(log n) memory. :class:`NaiveAdwin` stores every element and tests every
split exactly; it is the reference the bucketed form is checked against.

Both cut the window whenever some split ``W = W0 . W1`` (``W0`` older)
has ``|mean(W0) - mean(W1)| >= eps`` with::

    m     = 1 / (1/n0 + 1/n1)
    delta'= delta / n
    eps   = sqrt( ln(4 / delta') / (2 m) )

and keep dropping the oldest element (or bucket) until no split does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels

DEFAULT_DELTA = 0.002
DEFAULT_MAX_BUCKETS = 5
_LEVELS = 48


def adwin_epsilon(n0: int, n1: int, delta: float) -> float:
    """Cut threshold for sub-windows of ``n0`` and ``n1`` elements."""
    if n0 < 1 or n1 < 1:
        raise ValueError(f"sub-window lengths must be >= 1, got {n0}, {n1}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    m = 1.0 / (1.0 / n0 + 1.0 / n1)
    delta_prime = delta / (n0 + n1)
    return math.sqrt(math.log(4.0 / delta_prime) / (2.0 * m))


@dataclass(frozen=True)
class CutInspection:
    """Everything that goes into one cut test."""

    n0: int
    n1: int
    mean0: float
    mean1: float
    m: float
    delta_prime: float
    epsilon: float

    @property
    def cut(self) -> bool:
        return abs(self.mean0 - self.mean1) >= self.epsilon

    @classmethod
    def of(cls, n0: int, sum0: float, n1: int, sum1: float, delta: float) -> CutInspection:
        return cls(
            n0=n0,
            n1=n1,
            mean0=sum0 / n0,
            mean1=sum1 / n1,
            m=1.0 / (1.0 / n0 + 1.0 / n1),
            delta_prime=delta / (n0 + n1),
            epsilon=adwin_epsilon(n0, n1, delta),
        )


def _check_delta(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return float(delta)


def _check_value(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"ADWIN inputs must lie in [0, 1], got {x}")
    return x


class Adwin:
    """Bucketed ADWIN with at most ``max_buckets`` buckets per size class.

    Example:
        >>> w = Adwin(delta=0.01)
        >>> for _ in range(500):
        ...     _ = w.add(0.2)
        >>> any(w.add(0.8)[0] for _ in range(200))
        True
    """

    __slots__ = ("delta", "max_buckets", "_sums", "_sqs", "_counts", "width", "total", "total_sq",
                 "n_detections", "n_added")

    def __init__(self, delta: float = DEFAULT_DELTA, max_buckets: int = DEFAULT_MAX_BUCKETS):
        if max_buckets < 2:
            raise ValueError("max_buckets must be >= 2")
        self.delta = _check_delta(delta)
        self.max_buckets = int(max_buckets)
        self._sums = np.zeros((_LEVELS, self.max_buckets + 1))
        self._sqs = np.zeros((_LEVELS, self.max_buckets + 1))
        self._counts = np.zeros(_LEVELS, dtype=np.int64)
        self.width = 0
        self.total = 0.0
        self.total_sq = 0.0
        self.n_detections = 0
        self.n_added = 0

    @property
    def estimate(self) -> float:
        """Mean of the current window (0.0 when empty)."""
        return self.total / self.width if self.width else 0.0

    def add(self, x: float) -> tuple[bool, int]:
        """Append ``x`` and shrink the window if a cut fires.

        Returns:
            ``(change_detected, dropped)`` where ``dropped`` counts the
            elements removed from the tail.
        """
        x = _check_value(x)
        kernels.bucket_insert(self._sums, self._sqs, self._counts, x, self.max_buckets)
        self.width += 1
        self.total += x
        self.total_sq += x * x
        self.n_added += 1
        dropped, dsum, dsq = kernels.bucket_cut(
            self._sums, self._sqs, self._counts, self.width, self.total, self.delta
        )
        if dropped:
            self.width -= int(dropped)
            self.total -= dsum
            self.total_sq -= dsq
            self.n_detections += 1
            return True, int(dropped)
        return False, 0

    def buckets(self) -> Iterator[tuple[int, float, float]]:
        """Yield ``(count, sum, sum_of_squares)`` from oldest to newest."""
        live = np.nonzero(self._counts)[0]
        top = int(live[-1]) if live.size else 0
        for level in range(top, -1, -1):
            for slot in range(int(self._counts[level])):
                yield 1 << level, float(self._sums[level, slot]), float(self._sqs[level, slot])

    @property
    def n_buckets(self) -> int:
        return int(self._counts.sum())

    @property
    def largest_bucket(self) -> int:
        live = np.nonzero(self._counts)[0]
        return 1 << int(live[-1]) if live.size else 0

    def inspect(self) -> list[CutInspection]:
        """Cut tests at every bucket boundary of the current window."""
        out = []
        n0, s0 = 0, 0.0
        for count, s, _ in self.buckets():
            n0 += count
            s0 += s
            n1 = self.width - n0
            if n1 <= 0:
                break
            out.append(CutInspection.of(n0, s0, n1, self.total - s0, self.delta))
        return out


class NaiveAdwin:
    """Exact ADWIN that keeps every element and tests every split."""

    def __init__(self, delta: float = DEFAULT_DELTA):
        self.delta = _check_delta(delta)
        self._buf = np.zeros(64)
        self._start = 0
        self._end = 0
        self.n_detections = 0
        self.n_added = 0

    @property
    def width(self) -> int:
        return self._end - self._start

    @property
    def total(self) -> float:
        return float(self.window.sum())

    @property
    def window(self) -> np.ndarray:
        """Current window, oldest element first (a read-only view)."""
        view = self._buf[self._start : self._end]
        view.flags.writeable = False
        return view

    @property
    def estimate(self) -> float:
        return float(self.window.mean()) if self.width else 0.0

    def add(self, x: float) -> tuple[bool, int]:
        x = _check_value(x)
        if self._end == self._buf.shape[0]:
            live = self._buf[self._start : self._end]
            cap = max(64, 2 * live.shape[0])
            buf = np.zeros(cap)
            buf[: live.shape[0]] = live
            self._buf = buf
            self._end -= self._start
            self._start = 0
        self._buf[self._end] = x
        self._end += 1
        self.n_added += 1
        dropped = int(kernels.naive_cut(self._buf, self._start, self._end, self.delta))
        if dropped:
            self._start += dropped
            self.n_detections += 1
            return True, dropped
        return False, 0

    def inspect(self) -> list[CutInspection]:
        w = self.window
        cum = np.concatenate(([0.0], np.cumsum(w)))
        n = w.shape[0]
        return [
            CutInspection.of(j, cum[j], n - j, cum[n] - cum[j], self.delta) for j in range(1, n)
        ]
