"""Streaming evaluation protocols and metrics.

Models are duck-typed: ``predict(instance) -> (label, distribution)`` and
``train(instance)``. The positive class for the confusion counts is the
schema's first label (``oscillation`` for PMU streams).
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from typing import IO, Iterable, Protocol, Sequence

import numpy as np

from .stream import Instance

RESULTS_HEADER = ["instance", "predicted", "actual", "win_acc", "win_kappa", "cum_ms_per_inst"]


class Model(Protocol):
    def predict(self, inst: Instance) -> tuple[int, np.ndarray]: ...

    def train(self, inst: Instance) -> object: ...


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_labels(cls, predicted: Sequence[int], actual: Sequence[int], positive: int = 0) -> ConfusionCounts:
        p = np.asarray(predicted) == positive
        a = np.asarray(actual) == positive
        return cls(
            tp=int(np.sum(p & a)), tn=int(np.sum(~p & ~a)),
            fp=int(np.sum(p & ~a)), fn=int(np.sum(~p & a)),
        )


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise ValueError("accuracy undefined for zero instances")
    return (c.tp + c.tn) / c.total


def random_accuracy(c: ConfusionCounts) -> float:
    """Agreement expected by chance from the row and column marginals."""
    if c.total == 0:
        raise ValueError("random accuracy undefined for zero instances")
    return ((c.tn + c.fp) * (c.tn + c.fn) + (c.fn + c.tp) * (c.fp + c.tp)) / c.total**2


def kappa(c: ConfusionCounts) -> float | None:
    """Chance-corrected accuracy; ``None`` when chance agreement is 1."""
    pe = random_accuracy(c)
    if pe >= 1.0:
        return None
    return (accuracy(c) - pe) / (1.0 - pe)


@dataclass(frozen=True)
class EvalRecord:
    instance_index: int
    predicted: int
    actual: int
    windowed_accuracy: float
    windowed_kappa: float | None
    cum_ms_per_inst: float


class _Scorer:
    """Confusion counts over the last ``size`` outcomes (all of them if None)."""

    def __init__(self, size: int | None, positive: int):
        self.size = size
        self.positive = positive
        self.counts = [0, 0, 0, 0]  # tp, tn, fp, fn
        self._ring = np.zeros(size, dtype=np.int8) if size else None
        self._n = 0

    def _slot(self, predicted: int, actual: int) -> int:
        p, a = predicted == self.positive, actual == self.positive
        if p:
            return 0 if a else 2
        return 3 if a else 1

    def add(self, predicted: int, actual: int) -> None:
        slot = self._slot(predicted, actual)
        if self._ring is not None:
            k = self._n % self.size
            if self._n >= self.size:
                self.counts[self._ring[k]] -= 1
            self._ring[k] = slot
        self.counts[slot] += 1
        self._n += 1

    def confusion(self) -> ConfusionCounts:
        return ConfusionCounts(*self.counts)


def _record(i, pred, actual, scorer: _Scorer, ms: float) -> EvalRecord:
    c = scorer.confusion()
    return EvalRecord(i, pred, actual, accuracy(c), kappa(c), ms)


def prequential_eval(
    model: Model,
    stream: Iterable[Instance],
    window_size: int | None = 500,
    positive: int = 0,
    timed: bool = True,
) -> list[EvalRecord]:
    """Test-then-train, scoring over a sliding window of recent outcomes.

    ``window_size=None`` scores cumulatively. Only ``predict`` and
    ``train`` are inside the timed region. With ``timed=False`` the time
    column is 0, which makes records reproducible byte for byte.
    """
    if window_size is not None and window_size < 1:
        raise ValueError("window_size must be >= 1")
    scorer = _Scorer(window_size, positive)
    records = []
    elapsed = 0
    clock = time.perf_counter_ns
    for i, inst in enumerate(stream):
        t0 = clock()
        pred = int(model.predict(inst)[0])
        model.train(inst)
        if timed:
            elapsed += clock() - t0
        scorer.add(pred, inst.label)
        records.append(_record(i, pred, inst.label, scorer, elapsed / 1e6 / (i + 1)))
    return records


def interleaved_eval(model: Model, stream: Iterable[Instance], positive: int = 0, timed: bool = True) -> list[EvalRecord]:
    """Test-then-train with cumulative scoring."""
    return prequential_eval(model, stream, None, positive, timed)


def holdout_eval(
    model: Model,
    stream: Iterable[Instance],
    train_chunk: int,
    test_chunk: int,
    positive: int = 0,
    timed: bool = True,
) -> list[EvalRecord]:
    """Alternate ``train_chunk`` unscored training instances with
    ``test_chunk`` scored, untrained ones.

    One record per test block: its accuracy and kappa cover that block,
    and ``predicted``/``actual`` are those of the block's last instance.
    A trailing partial test block still yields a record.
    """
    if train_chunk < 1 or test_chunk < 1:
        raise ValueError("train_chunk and test_chunk must be >= 1")
    records = []
    elapsed = 0
    seen = 0
    clock = time.perf_counter_ns
    period = train_chunk + test_chunk
    scorer = None
    last = None
    for i, inst in enumerate(stream):
        phase = i % period
        t0 = clock()
        if phase < train_chunk:
            model.train(inst)
        else:
            pred = int(model.predict(inst)[0])
        if timed:
            elapsed += clock() - t0
        seen += 1
        if phase < train_chunk:
            continue
        if phase == train_chunk:
            scorer = _Scorer(None, positive)
        scorer.add(pred, inst.label)
        last = (i, pred, inst.label)
        if phase == period - 1:
            records.append(_record(*last, scorer, elapsed / 1e6 / seen))
            scorer = None
    if scorer is not None and last is not None:
        records.append(_record(*last, scorer, elapsed / 1e6 / seen))
    return records


@dataclass(frozen=True)
class Summary:
    n: int
    avg_accuracy: float
    avg_kappa: float | None
    ms_per_instance: float

    def line(self) -> str:
        k = "nan" if self.avg_kappa is None else f"{self.avg_kappa:.4f}"
        return (
            f"instances={self.n} avg_accuracy={self.avg_accuracy:.4f} "
            f"avg_kappa={k} ms_per_instance={self.ms_per_instance:.4f}"
        )


def summarize(records: Sequence[EvalRecord]) -> Summary:
    """Mean windowed accuracy and kappa; time is the last cumulative average."""
    if not records:
        raise ValueError("no records to summarize")
    acc = float(np.mean([r.windowed_accuracy for r in records]))
    kappas = [r.windowed_kappa for r in records if r.windowed_kappa is not None]
    return Summary(
        n=len(records),
        avg_accuracy=acc,
        avg_kappa=float(np.mean(kappas)) if kappas else None,
        ms_per_instance=records[-1].cum_ms_per_inst,
    )


def summarize_many(runs: Sequence[Sequence[EvalRecord]]) -> Summary:
    """Pool several runs: accuracy and kappa averaged over every record,
    time as total elapsed over total instances."""
    records = [r for run in runs for r in run]
    pooled = summarize(records)
    total_ms = sum(run[-1].cum_ms_per_inst * len(run) for run in runs if run)
    return Summary(pooled.n, pooled.avg_accuracy, pooled.avg_kappa, total_ms / pooled.n)


@dataclass(frozen=True)
class DriftResponse:
    """Windowed accuracy around one drift position ``p``.

    ``before`` is the value at ``p - 1``, ``dip`` the minimum over
    ``[p, p + dip_span)``, ``recovery`` the mean over ``[p + width, next)``
    where ``next`` is the following drift position or the stream end.
    """

    position: int
    before: float
    dip: float
    recovery: float

    @property
    def drop(self) -> float:
        return self.before - self.dip


def drift_response(
    records: Sequence[EvalRecord], positions: Sequence[int], width: float, dip_span: int = 300
) -> list[DriftResponse]:
    acc = np.array([r.windowed_accuracy for r in records])
    n = acc.shape[0]
    out = []
    bounds = list(positions[1:]) + [n]
    for p, nxt in zip(positions, bounds):
        if not 0 < p < n:
            raise ValueError(f"drift position {p} outside the evaluated stream")
        lo = min(n - 1, p + int(width))
        out.append(DriftResponse(
            int(p), float(acc[p - 1]), float(acc[p : min(n, p + dip_span)].min()),
            float(acc[lo : max(lo + 1, min(n, nxt))].mean()),
        ))
    return out


def write_results_csv(records: Iterable[EvalRecord], fh: IO[str], labels: Sequence[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for r in records:
        w.writerow([
            r.instance_index,
            labels[r.predicted],
            labels[r.actual],
            repr(r.windowed_accuracy),
            "" if r.windowed_kappa is None else repr(r.windowed_kappa),
            repr(r.cum_ms_per_inst),
        ])


def read_results_csv(fh: IO[str], labels: Sequence[str]) -> list[EvalRecord]:
    index = {name: i for i, name in enumerate(labels)}
    rows = csv.reader(fh)
    header = next(rows)
    if header != RESULTS_HEADER:
        raise ValueError(f"unexpected results header {header}")
    out = []
    for row in rows:
        k = row[4]
        out.append(EvalRecord(
            int(row[0]), index[row[1]], index[row[2]], float(row[3]),
            None if k == "" else float(k), float(row[5]),
        ))
    return out

