"""Impurity measures, split merit and the Hoeffding bound."""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

import numpy as np

from .. import kernels


class SplitCriterion(str, Enum):
    INFO_GAIN = "info_gain"
    GINI = "gini"

    @property
    def code(self) -> int:
        return kernels.ENTROPY if self is SplitCriterion.INFO_GAIN else kernels.GINI

    def merit_range(self, n_classes: int) -> float:
        """Range R of the merit, used in the Hoeffding bound."""
        if self is SplitCriterion.INFO_GAIN:
            return math.log2(max(n_classes, 2))
        return 1.0

    @classmethod
    def parse(cls, value: str | SplitCriterion) -> SplitCriterion:
        if isinstance(value, cls):
            return value
        aliases = {"entropy": "info_gain", "infogain": "info_gain", "ig": "info_gain"}
        return cls(aliases.get(str(value).lower(), str(value).lower()))


def _check_dist(dist: Sequence[float]) -> np.ndarray:
    p = np.asarray(dist, dtype=np.float64)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities must sum to 1, got {p.sum()!r}")
    return p


def entropy(dist: Sequence[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = _check_dist(dist)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def gini(dist: Sequence[float]) -> float:
    """Gini impurity ``1 - sum(p^2)``."""
    p = _check_dist(dist)
    return float(1.0 - (p * p).sum())


def impurity(counts: Sequence[float], criterion: SplitCriterion) -> float:
    """Impurity of an unnormalized class-mass vector (0 for empty mass)."""
    c = np.asarray(counts, dtype=np.float64)
    total = c.sum()
    if total <= 0:
        return 0.0
    p = c / total
    if criterion is SplitCriterion.INFO_GAIN:
        nz = p[p > 0]
        return float(-(nz * np.log2(nz)).sum()) + 0.0
    return float(1.0 - (p * p).sum())


def partition_merit(
    parent: Sequence[float], children: Sequence[Sequence[float]], criterion: SplitCriterion
) -> float:
    """Impurity decrease from splitting ``parent`` mass into ``children``.

    Empty children contribute nothing. Round-off below zero is clamped.
    """
    parent = np.asarray(parent, dtype=np.float64)
    total = parent.sum()
    if total <= 0:
        return 0.0
    merit = impurity(parent, criterion)
    for child in children:
        child = np.asarray(child, dtype=np.float64)
        mass = child.sum()
        if mass > 0:
            merit -= (mass / total) * impurity(child, criterion)
    return max(merit, 0.0)


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """``sqrt(R^2 ln(1/delta) / (2 n))``.

    ``delta == 1`` is accepted and gives 0.
    """
    if value_range <= 0:
        raise ValueError("range must be positive")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))
