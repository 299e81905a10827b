"""Synthetic oscillation-signature streams.

Each signature defines an oscillation-frequency band and a duration
threshold ``T``: events lasting longer than ``T`` are oscillations, the
rest are normal. Streams are class-balanced and carry gradual concept
drift: around each drift position the active threshold moves (between
``T`` and ``T * (1 + shift)``), mixed in with sigmoid probability
``1 / (1 + exp(-4 (t - p) / width))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .stream import AttributeSpec, Instance, ListStream, Schema, StreamSource

OSCILLATION = 0
NORMAL = 1

PMU_SCHEMA = Schema(
    attributes=(
        AttributeSpec("f_osc"),
        AttributeSpec("duration"),
        AttributeSpec("v"),
        AttributeSpec("i"),
        AttributeSpec("phi"),
    ),
    class_labels=("oscillation", "normal"),
)

# (mean, sd) of the auxiliary measurements for normal events; oscillation
# events shift the magnitude means up by one sd.
V_MAG = (1.0, 0.02)
I_MAG = (1.0, 0.05)
PHASE = (10.0, 5.0)

_BLOCK = 20


@dataclass(frozen=True)
class SignatureSpec:
    osc_freq_range: tuple[float, float]
    duration_threshold: float
    cause_tag: str = ""
    n_per_class: int = 2000

    def __post_init__(self):
        lo, hi = self.osc_freq_range
        if not 0 < lo < hi:
            raise ValueError(f"bad frequency range {self.osc_freq_range}")
        if self.duration_threshold <= 0:
            raise ValueError("duration_threshold must be positive")
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be >= 1")

    @property
    def length(self) -> int:
        return 2 * self.n_per_class


SIGNATURES = (
    SignatureSpec((0.1, 0.15), 400.0, "Generators"),
    SignatureSpec((0.15, 1.0), 120.0, "Local plant control"),
    SignatureSpec((1.0, 5.0), 60.0, "Inter-area oscillation"),
    SignatureSpec((5.0, 14.0), 50.0, "Local plant control"),
)


@dataclass(frozen=True)
class DriftSpec:
    """Gradual drift positions; concept ``j`` is active after the ``j``-th drift.

    Even concepts use the signature threshold, odd ones the threshold
    scaled by ``1 + shift``.
    """

    positions: tuple[int, ...] = (1000, 2000)
    width: float = 200.0
    shift: float = 0.25
    style: str = "gradual"

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(p) for p in self.positions))
        if list(self.positions) != sorted(self.positions) or any(p < 0 for p in self.positions):
            raise ValueError("drift positions must be sorted and non-negative")
        if self.width <= 0:
            raise ValueError("drift width must be positive")
        if not -0.75 < self.shift < 0.75:
            raise ValueError("shift must keep the threshold inside the duration range")
        if self.style != "gradual":
            raise ValueError("only gradual drift is supported")

    def threshold(self, base: float, concept: int) -> float:
        return base * (1.0 + self.shift) if concept % 2 else base

    def mixing(self, t: np.ndarray | float) -> np.ndarray:
        """Probability that each drift has kicked in at instance ``t``."""
        t = np.asarray(t, dtype=np.float64)
        p = np.asarray(self.positions, dtype=np.float64)
        return expit(4.0 * (t[..., None] - p) / self.width)


NO_DRIFT = DriftSpec(positions=())


def label_event(osc_freq: float, duration: float, spec: SignatureSpec, threshold: float | None = None) -> int:
    """Oscillation if the event outlasts the threshold; the boundary itself is normal."""
    lo, hi = spec.osc_freq_range
    if not lo <= osc_freq <= hi:
        raise ValueError(f"frequency {osc_freq} outside signature range {spec.osc_freq_range}")
    thr = spec.duration_threshold if threshold is None else threshold
    return OSCILLATION if duration > thr else NORMAL


class SignatureStream(StreamSource):
    """Lazily generated signature stream; memory does not grow with length.

    ``concept`` holds the concept index that produced the last instance.
    """

    def __init__(
        self,
        spec: SignatureSpec,
        drift: DriftSpec = DriftSpec(),
        seed: int = 0,
        index: int = 0,
        chunk_blocks: int = 200,
    ):
        if any(p > spec.length for p in drift.positions):
            raise ValueError(f"drift positions {drift.positions} beyond stream length {spec.length}")
        self.schema = PMU_SCHEMA
        self.spec = spec
        self.drift = drift
        self.seed = int(seed)
        self.index = int(index)
        self._rng = np.random.default_rng([self.seed, self.index])
        self._remaining = [spec.n_per_class, spec.n_per_class]
        self._t = 0
        self._chunk_blocks = chunk_blocks
        self._buf: tuple[np.ndarray, ...] = ()
        self._pos = 0
        self.concept = 0

    def __len__(self) -> int:
        return self.spec.length

    def _labels(self) -> np.ndarray:
        out = []
        for _ in range(self._chunk_blocks):
            n_osc = min(_BLOCK // 2, self._remaining[OSCILLATION])
            n_norm = min(_BLOCK // 2, self._remaining[NORMAL])
            if n_osc + n_norm == 0:
                break
            block = np.array([OSCILLATION] * n_osc + [NORMAL] * n_norm)
            self._rng.shuffle(block)
            out.append(block)
            self._remaining[OSCILLATION] -= n_osc
            self._remaining[NORMAL] -= n_norm
        return np.concatenate(out) if out else np.empty(0, dtype=np.int64)

    def next_chunk(self) -> tuple[np.ndarray, ...] | None:
        """Draw the next chunk as ``(values[n, 5], labels[n], concepts[n])``."""
        labels = self._labels()
        n = labels.shape[0]
        if n == 0:
            return None
        rng = self._rng
        spec, drift = self.spec, self.drift
        t = np.arange(self._t, self._t + n)
        self._t += n

        concepts = np.zeros(n, dtype=np.int64)
        if drift.positions:
            u = rng.random((n, len(drift.positions)))
            active = u < drift.mixing(t)
            # nested mixing: drift j only applies once drift j-1 has
            concepts = np.cumprod(active, axis=1).sum(axis=1)
        base = spec.duration_threshold
        thr = np.where(concepts % 2 == 1, base * (1.0 + drift.shift), base)

        lo_d, hi_d = 0.25 * base, 1.75 * base
        u = rng.random(n)
        osc = labels == OSCILLATION
        # normal events on [lo_d, thr], oscillations on (thr, hi_d]
        duration = np.where(osc, hi_d - u * (hi_d - thr), lo_d + u * (thr - lo_d))
        f_lo, f_hi = spec.osc_freq_range
        f_osc = f_lo + rng.random(n) * (f_hi - f_lo)
        bump = osc.astype(np.float64)
        v = rng.normal(V_MAG[0], V_MAG[1], n) + bump * V_MAG[1]
        i = rng.normal(I_MAG[0], I_MAG[1], n) + bump * I_MAG[1]
        phi = rng.normal(PHASE[0], PHASE[1], n)
        values = np.column_stack([f_osc, duration, v, i, phi])
        values.flags.writeable = False
        return values, labels, concepts

    def __next__(self) -> Instance:
        if not self._buf or self._pos >= self._buf[1].shape[0]:
            chunk = self.next_chunk()
            if chunk is None:
                raise StopIteration
            self._buf = chunk
            self._pos = 0
        values, labels, concepts = self._buf
        k = self._pos
        self._pos += 1
        self.concept = int(concepts[k])
        return Instance(values[k], int(labels[k]))


@dataclass
class GeneratedSignature:
    spec: SignatureSpec
    drift: DriftSpec
    seed: int
    index: int
    values: np.ndarray
    labels: np.ndarray
    concepts: np.ndarray
    instances: list[Instance] = field(repr=False)

    def stream(self) -> ListStream:
        return ListStream(PMU_SCHEMA, self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def thresholds(self) -> np.ndarray:
        """Duration threshold of the concept behind each instance."""
        base = self.spec.duration_threshold
        return np.where(self.concepts % 2 == 1, base * (1.0 + self.drift.shift), base)

    def metadata(self) -> dict[str, str]:
        lo, hi = self.spec.osc_freq_range
        return {
            "signature": str(self.index + 1),
            "seed": str(self.seed),
            "osc_freq_low": repr(lo),
            "osc_freq_high": repr(hi),
            "duration_threshold": repr(self.spec.duration_threshold),
            "cause": self.spec.cause_tag,
            "n_per_class": str(self.spec.n_per_class),
            "drift_positions": " ".join(str(p) for p in self.drift.positions),
            "drift_width": repr(self.drift.width),
            "drift_shift": repr(self.drift.shift),
            "drift_style": self.drift.style,
        }


def generate_signature(
    spec: SignatureSpec, drift: DriftSpec = DriftSpec(), seed: int = 0, index: int = 0
) -> GeneratedSignature:
    """Materialize one signature stream with its ground truth."""
    src = SignatureStream(spec, drift, seed, index)
    parts = []
    while (chunk := src.next_chunk()) is not None:
        parts.append(chunk)
    values = np.concatenate([p[0] for p in parts])
    labels = np.concatenate([p[1] for p in parts])
    concepts = np.concatenate([p[2] for p in parts])
    values.flags.writeable = False
    instances = [Instance(values[k], int(labels[k])) for k in range(labels.shape[0])]
    return GeneratedSignature(spec, drift, int(seed), int(index), values, labels, concepts, instances)


def generate_dataset(
    seed: int = 0,
    specs: Sequence[SignatureSpec] = SIGNATURES,
    drift: DriftSpec = DriftSpec(),
    which: Sequence[int] | None = None,
) -> list[GeneratedSignature]:
    """Generate the signatures listed in ``which`` (0-based; default all)."""
    idx = range(len(specs)) if which is None else which
    return [generate_signature(specs[i], drift, seed, i) for i in idx]


@dataclass(frozen=True)
class BalanceReport:
    overall: np.ndarray  # per-class proportions over the whole stream
    windows: np.ndarray  # (n_windows, n_classes) proportions of every full sliding window

    @property
    def empty(self) -> bool:
        return self.overall.size == 0


def class_balance(labels: Sequence[int], window: int = 500, n_classes: int = 2) -> BalanceReport:
    """Overall and sliding-window class proportions of a label sequence."""
    y = np.asarray(labels, dtype=np.int64)
    if y.size == 0:
        return BalanceReport(np.empty(0), np.empty((0, n_classes)))
    onehot = np.zeros((y.size, n_classes))
    onehot[np.arange(y.size), y] = 1.0
    overall = onehot.mean(axis=0)
    if y.size < window:
        return BalanceReport(overall, np.empty((0, n_classes)))
    cum = np.vstack([np.zeros(n_classes), np.cumsum(onehot, axis=0)])
    windows = (cum[window:] - cum[:-window]) / window
    return BalanceReport(overall, windows)


def write_metadata(meta: dict[str, str], fh) -> None:
    """Sidecar format: one ``key=value`` per line, keys sorted."""
    for key in sorted(meta):
        fh.write(f"{key}={meta[key]}\n")


def read_metadata(fh) -> dict[str, str]:
    out = {}
    for line in fh:
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value
    return out
