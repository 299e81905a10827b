"""Schemas, instances, stream sources and the CSV interchange format."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

import numpy as np


class SchemaError(ValueError):
    """An instance or file does not conform to its schema."""


class CsvFormatError(SchemaError):
    """A CSV row could not be parsed. ``row`` is 1-based, header = row 1."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class AttributeSpec:
    """One input attribute. ``values`` is ``None`` for numeric attributes."""

    name: str
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if self.values is not None:
            object.__setattr__(self, "values", tuple(self.values))
            if not self.values:
                raise SchemaError(f"nominal attribute {self.name!r} has no values")
            if len(set(self.values)) != len(self.values):
                raise SchemaError(f"nominal attribute {self.name!r} has duplicate values")

    @property
    def is_nominal(self) -> bool:
        return self.values is not None

    @classmethod
    def numeric(cls, name: str) -> AttributeSpec:
        return cls(name)

    @classmethod
    def nominal(cls, name: str, values: Sequence[str]) -> AttributeSpec:
        return cls(name, tuple(values))


@dataclass(frozen=True)
class Schema:
    attributes: tuple[AttributeSpec, ...]
    class_labels: tuple[str, ...]
    class_name: str = "class"
    numeric_indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        if not self.attributes:
            raise SchemaError("schema needs at least one attribute")
        if len(self.class_labels) < 2:
            raise SchemaError("schema needs at least two class labels")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise SchemaError("duplicate class labels")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if self.class_name in names:
            raise SchemaError(f"class column {self.class_name!r} listed among attributes")
        numeric = [i for i, a in enumerate(self.attributes) if not a.is_nominal]
        object.__setattr__(self, "numeric_indices", np.array(numeric, dtype=np.int64))

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]

    @property
    def header(self) -> list[str]:
        return self.attribute_names + [self.class_name]

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise SchemaError(f"unknown attribute {name!r}")

    def label_index(self, label: str) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise SchemaError(f"unknown class label {label!r}") from None

    def instance(self, values: Sequence[float], label: int | str, weight: float = 1.0) -> Instance:
        """Build a validated instance; ``label`` may be an index or a label string."""
        if isinstance(label, str):
            label = self.label_index(label)
        inst = Instance(values, label, weight)
        self.check(inst)
        return inst

    def check(self, inst: Instance) -> None:
        if inst.values.shape[0] != self.n_attributes:
            raise SchemaError(
                f"instance has {inst.values.shape[0]} values, schema has {self.n_attributes}"
            )
        if not 0 <= inst.label < self.n_classes:
            raise SchemaError(f"label index {inst.label} out of range")
        for i, a in enumerate(self.attributes):
            if a.is_nominal:
                v = inst.values[i]
                if v != int(v) or not 0 <= v < len(a.values):
                    raise SchemaError(f"nominal index {v} out of range for {a.name!r}")


class Instance:
    """One labelled observation.

    ``values`` is a read-only float64 array; nominal attributes hold the
    value index. Instances are immutable once built.
    """

    __slots__ = ("values", "label", "weight")

    def __init__(self, values, label: int, weight: float = 1.0):
        arr = np.array(values, dtype=np.float64)
        arr.flags.writeable = False
        if weight < 0:
            raise SchemaError("instance weight must be non-negative")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "label", int(label))
        object.__setattr__(self, "weight", float(weight))

    def __setattr__(self, name, value):
        raise AttributeError("Instance is immutable")

    def with_weight(self, weight: float) -> Instance:
        out = object.__new__(Instance)
        object.__setattr__(out, "values", self.values)
        object.__setattr__(out, "label", self.label)
        object.__setattr__(out, "weight", float(weight))
        return out

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.label == other.label
            and self.weight == other.weight
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"Instance({self.values.tolist()}, label={self.label}, weight={self.weight})"


class StreamSource:
    """Single-pass iterator of instances sharing one schema."""

    schema: Schema

    def __iter__(self) -> Iterator[Instance]:
        return self

    def __next__(self) -> Instance:  # pragma: no cover - abstract
        raise NotImplementedError


class ListStream(StreamSource):
    """Stream over an in-memory sequence (test fixtures, generated data)."""

    def __init__(self, schema: Schema, instances: Iterable[Instance]):
        self.schema = schema
        self._it = iter(instances)

    def __next__(self) -> Instance:
        return next(self._it)


def _as_text_reader(reader: IO) -> IO[str]:
    if isinstance(reader, (io.RawIOBase, io.BufferedIOBase)):
        return io.TextIOWrapper(reader, encoding="utf-8", newline="")
    return reader


class CsvStream(StreamSource):
    """Lazily parses rows; holds only the current row in memory."""

    def __init__(self, reader: IO, schema: Schema):
        self.schema = schema
        self._rows = csv.reader(_as_text_reader(reader))
        self._row = 1
        self._value_maps = [
            {v: float(j) for j, v in enumerate(a.values)} if a.is_nominal else None
            for a in schema.attributes
        ]
        self._labels = {v: j for j, v in enumerate(schema.class_labels)}
        try:
            header = next(self._rows)
        except StopIteration:
            raise CsvFormatError(1, "missing header row") from None
        if [h.strip() for h in header] != schema.header:
            raise CsvFormatError(1, f"header {header} does not match schema {schema.header}")

    def __next__(self) -> Instance:
        fields = next(self._rows)
        self._row += 1
        while not fields:
            fields = next(self._rows)
            self._row += 1
        return self._parse(fields)

    def _parse(self, fields: list[str]) -> Instance:
        n_attr = self.schema.n_attributes
        if len(fields) != n_attr + 1:
            raise CsvFormatError(self._row, f"expected {n_attr + 1} fields, got {len(fields)}")
        values = np.empty(n_attr)
        for i in range(n_attr):
            mapping = self._value_maps[i]
            text = fields[i]
            if mapping is None:
                try:
                    values[i] = float(text)
                except ValueError:
                    raise CsvFormatError(self._row, f"bad number {text!r}") from None
            else:
                try:
                    values[i] = mapping[text]
                except KeyError:
                    name = self.schema.attributes[i].name
                    raise CsvFormatError(
                        self._row, f"unknown value {text!r} for attribute {name!r}"
                    ) from None
        try:
            label = self._labels[fields[n_attr]]
        except KeyError:
            raise CsvFormatError(self._row, f"unknown class label {fields[n_attr]!r}") from None
        return Instance(values, label)


def parse_csv_stream(reader: IO, schema: Schema) -> CsvStream:
    """Open a streaming CSV reader. The header is validated immediately."""
    return CsvStream(reader, schema)


def _format_value(attr: AttributeSpec, v: float) -> str:
    if attr.is_nominal:
        return attr.values[int(v)]
    return repr(float(v))


def write_csv_stream(instances: Iterable[Instance], schema: Schema, writer: IO) -> int:
    """Write a header plus one row per instance; returns the row count.

    Floats use ``repr`` (shortest round-trip form), so parsing the output
    reproduces every value bit for bit.
    """
    wrapped = None
    if isinstance(writer, (io.RawIOBase, io.BufferedIOBase)):
        wrapped = io.TextIOWrapper(writer, encoding="utf-8", newline="")
        out = wrapped
    else:
        out = writer
    attrs = schema.attributes
    labels = schema.class_labels
    out.write(",".join(schema.header) + "\n")
    n = 0
    for inst in instances:
        row = [_format_value(a, v) for a, v in zip(attrs, inst.values)]
        row.append(labels[inst.label])
        out.write(",".join(row) + "\n")
        n += 1
    if wrapped is not None:
        wrapped.flush()
        wrapped.detach()
    return n
