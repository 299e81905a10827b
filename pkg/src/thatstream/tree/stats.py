"""Per-leaf sufficient statistics and split candidates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..kernels.split import _left_mass
from ..stream import Schema
from .criteria import SplitCriterion, partition_merit


@dataclass(frozen=True)
class SplitTest:
    """Binary ``<= threshold`` test, or multiway nominal test if threshold is None."""

    attribute: int
    threshold: float | None = None

    @property
    def is_nominal(self) -> bool:
        return self.threshold is None


@dataclass
class SplitCandidate:
    test: SplitTest
    merit: float
    child_counts: list[np.ndarray]


@dataclass(frozen=True)
class ThresholdSuggestion:
    threshold: float
    left: np.ndarray
    right: np.ndarray


def suggest_numeric_splits(
    weight: np.ndarray,
    mean: np.ndarray,
    m2: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    k: int = 10,
) -> list[ThresholdSuggestion]:
    """Candidate thresholds for one numeric attribute.

    Each argument is a per-class vector of the attribute's Gaussian
    observer. Thresholds are ``k`` points equally spaced strictly inside
    ``[min, max]``; the class mass on each side comes from the per-class
    normal CDF.
    """
    live = weight > 0
    if not live.any():
        return []
    glo = float(lo[live].min())
    ghi = float(hi[live].max())
    if not ghi > glo:
        return []
    step = (ghi - glo) / (k + 1)
    out = []
    for j in range(k):
        t = glo + step * (j + 1)
        left = np.array(
            [_left_mass(t, weight[c], mean[c], m2[c], lo[c], hi[c]) for c in range(weight.shape[0])]
        )
        out.append(ThresholdSuggestion(t, left, weight - left))
    return out


class SufficientStats:
    """Class counts plus per-(attribute, class) observers for one leaf.

    ``class_counts`` may start from an inherited prior (the estimated
    class mass on this side of the parent's split); ``n_seen`` is always
    its sum. Observers only hold mass that actually reached the leaf.
    """

    __slots__ = ("schema", "class_counts", "w", "mean", "m2", "lo", "hi", "nominal")

    def __init__(self, schema: Schema, prior: np.ndarray | None = None):
        n_attr, n_cls = schema.n_attributes, schema.n_classes
        self.schema = schema
        self.class_counts = np.zeros(n_cls) if prior is None else np.array(prior, dtype=np.float64)
        self.w = np.zeros((n_attr, n_cls))
        self.mean = np.zeros((n_attr, n_cls))
        self.m2 = np.zeros((n_attr, n_cls))
        self.lo = np.full((n_attr, n_cls), np.inf)
        self.hi = np.full((n_attr, n_cls), -np.inf)
        self.nominal = {
            i: np.zeros((len(a.values), n_cls))
            for i, a in enumerate(schema.attributes)
            if a.is_nominal
        }

    @property
    def n_seen(self) -> float:
        return float(self.class_counts.sum())

    @property
    def observed(self) -> np.ndarray:
        """Class mass that reached this leaf (excludes any prior)."""
        if self.schema.numeric_indices.size:
            return self.w[self.schema.numeric_indices[0]].copy()
        return next(iter(self.nominal.values())).sum(axis=0)

    def is_pure(self) -> bool:
        return int(np.count_nonzero(self.class_counts)) <= 1

    def update(self, values: np.ndarray, label: int, weight: float = 1.0) -> None:
        self.class_counts[label] += weight
        if self.schema.numeric_indices.size:
            kernels.gaussian_update(
                self.w, self.mean, self.m2, self.lo, self.hi,
                values, self.schema.numeric_indices, label, weight,
            )
        for i, table in self.nominal.items():
            table[int(values[i]), label] += weight

    def predict(self) -> int:
        if not self.class_counts.any():
            return 0
        return int(np.argmax(self.class_counts))

    def distribution(self) -> np.ndarray:
        total = self.class_counts.sum()
        if total <= 0:
            return np.full(self.class_counts.shape[0], 1.0 / self.class_counts.shape[0])
        return self.class_counts / total

    def numeric_suggestions(self, attribute: int, k: int = 10) -> list[ThresholdSuggestion]:
        return suggest_numeric_splits(
            self.w[attribute], self.mean[attribute], self.m2[attribute],
            self.lo[attribute], self.hi[attribute], k,
        )

    def merit(self, test: SplitTest, criterion: SplitCriterion) -> float:
        """Merit of one specific candidate test."""
        a = test.attribute
        if not 0 <= a < self.schema.n_attributes:
            raise IndexError(f"unknown attribute index {a}")
        if self.schema.attributes[a].is_nominal:
            table = self.nominal[a]
            return partition_merit(table.sum(axis=0), list(table), criterion)
        w = self.w[a]
        left = np.array(
            [
                _left_mass(test.threshold, w[c], self.mean[a, c], self.m2[a, c],
                           self.lo[a, c], self.hi[a, c])
                for c in range(w.shape[0])
            ]
        )
        return partition_merit(w, [left, w - left], criterion)

    def best_splits(self, criterion: SplitCriterion, k: int = 10) -> list[SplitCandidate]:
        """Best candidate per attribute, in schema order.

        Attributes with no admissible test (constant values, unseen) are
        omitted.
        """
        out: dict[int, SplitCandidate] = {}
        numeric = self.schema.numeric_indices
        if numeric.size:
            merit, thr, left, right = kernels.numeric_merits(
                self.w, self.mean, self.m2, self.lo, self.hi, numeric, k, criterion.code
            )
            for i, a in enumerate(numeric):
                if math.isfinite(merit[i]):
                    out[int(a)] = SplitCandidate(
                        SplitTest(int(a), float(thr[i])), float(merit[i]),
                        [left[i].copy(), right[i].copy()],
                    )
        for a, table in self.nominal.items():
            if np.count_nonzero(table.sum(axis=1)) < 1:
                continue
            merit = partition_merit(table.sum(axis=0), list(table), criterion)
            out[a] = SplitCandidate(SplitTest(a, None), merit, [row.copy() for row in table])
        return [out[a] for a in sorted(out)]
