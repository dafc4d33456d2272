"""Domain types shared by every pipeline stage: schemas, instances, datasets."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CLASSES = ("Accept", "Reject", "Missed", "Outgoing")
BEHAVIOR_COLUMN = "behavior"
DELIMITER = ","

# Stand-in for any value outside an attribute's domain at prediction time.
OUT_OF_DOMAIN = "<ood>"
OOD_CODE = -1


class SchemaError(ValueError):
    pass


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeSchema:
    attributes: tuple[str, ...]
    domains: tuple[tuple[str, ...], ...]
    class_set: tuple[str, ...] = DEFAULT_CLASSES

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "domains", tuple(tuple(d) for d in self.domains))
        object.__setattr__(self, "class_set", tuple(self.class_set))
        if len(set(self.attributes)) != len(self.attributes):
            raise SchemaError(f"duplicate attribute names in {self.attributes}")
        if len(self.domains) != len(self.attributes):
            raise SchemaError("one domain is required per attribute")
        if len(self.class_set) < 2 or len(set(self.class_set)) != len(self.class_set):
            raise SchemaError(f"class_set needs >= 2 distinct labels, got {self.class_set}")
        for name, dom in zip(self.attributes, self.domains):
            if len(set(dom)) != len(dom):
                raise SchemaError(f"duplicate values in domain of {name!r}")
            if OUT_OF_DOMAIN in dom:
                raise SchemaError(f"{OUT_OF_DOMAIN!r} is reserved")

    @classmethod
    def from_mapping(cls, domains: dict[str, Sequence[str]], class_set: Sequence[str] = DEFAULT_CLASSES):
        return cls(tuple(domains), tuple(tuple(v) for v in domains.values()), tuple(class_set))

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def n_classes(self) -> int:
        return len(self.class_set)

    def index(self, attribute: str) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise KeyError(f"unknown attribute {attribute!r}") from None

    def class_index(self, label: str) -> int:
        try:
            return self.class_set.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in class set {self.class_set}") from None

    @cached_property
    def _value_codes(self) -> tuple[dict[str, int], ...]:
        return tuple({v: i for i, v in enumerate(dom)} for dom in self.domains)

    @cached_property
    def _class_codes(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.class_set)}

    def encode_values(self, values: Sequence[str]) -> np.ndarray:
        """Map one row of values to domain codes; unknown values become ``OOD_CODE``."""
        return np.array(
            [codes.get(v, OOD_CODE) for codes, v in zip(self._value_codes, values)],
            dtype=np.int64,
        )

    def encode_label(self, label: str) -> int:
        return self._class_codes.get(label, -1)


@dataclass(frozen=True)
class Instance:
    values: tuple[str, ...]
    label: str
    id: int = 0


@dataclass(frozen=True, eq=False)
class Dataset:
    """A schema plus an ordered collection of labelled rows.

    Rows are stored as plain tuples; ``Instance`` objects and the integer
    encoding used by the learners are derived lazily.  Instance ids are the
    row positions, so they are always ``0..n-1``.
    """

    schema: AttributeSchema
    rows: tuple[tuple[str, ...], ...] = ()
    labels: tuple[str, ...] = ()
    _encoded: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.rows, tuple):
            object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not isinstance(self.labels, tuple):
            object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.rows) != len(self.labels):
            raise ValueError("rows and labels differ in length")

    @classmethod
    def from_instances(cls, schema: AttributeSchema, instances: Iterable[Instance]) -> "Dataset":
        instances = list(instances)
        return cls(schema, tuple(i.values for i in instances), tuple(i.label for i in instances))

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.schema == other.schema and self.rows == other.rows and self.labels == other.labels

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def instances(self) -> tuple[Instance, ...]:
        return tuple(Instance(r, l, i) for i, (r, l) in enumerate(zip(self.rows, self.labels)))

    def _encode(self) -> tuple[np.ndarray, np.ndarray]:
        if self._encoded is None:
            m = self.schema.n_attributes
            vcodes = self.schema._value_codes
            X = np.empty((len(self.rows), m), dtype=np.int64)
            for i, row in enumerate(self.rows):
                if len(row) != m:
                    raise SchemaError(f"instance {i} has {len(row)} values, schema has {m}")
                X[i] = [vcodes[a].get(v, OOD_CODE) for a, v in enumerate(row)]
            cc = self.schema._class_codes
            y = np.array([cc.get(l, -1) for l in self.labels], dtype=np.int64)
            X.setflags(write=False)
            y.setflags(write=False)
            object.__setattr__(self, "_encoded", (X, y))
        return self._encoded  # type: ignore[return-value]

    @property
    def X(self) -> np.ndarray:
        """Integer value codes, shape (n, n_attributes); read-only."""
        return self._encode()[0]

    @property
    def y(self) -> np.ndarray:
        """Integer class codes aligned with ``schema.class_set``; read-only."""
        return self._encode()[1]

    def take(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        """New dataset holding the given rows in the given order, renumbered."""
        idx = np.asarray(indices, dtype=np.int64)
        rows = tuple(self.rows[i] for i in idx.tolist())
        labels = tuple(self.labels[i] for i in idx.tolist())
        enc = None
        if self._encoded is not None:
            X, y = self._encoded[0][idx], self._encoded[1][idx]
            X.setflags(write=False)
            y.setflags(write=False)
            enc = (X, y)
        return Dataset(self.schema, rows, labels, enc)


@dataclass(frozen=True)
class Violation:
    instance_id: int
    reason: str


def validate(dataset: Dataset) -> list[Violation]:
    """Check every instance against the schema; an empty list means ok."""
    schema = dataset.schema
    out = []
    for i, (row, label) in enumerate(zip(dataset.rows, dataset.labels)):
        if len(row) != schema.n_attributes:
            out.append(Violation(i, f"expected {schema.n_attributes} values, got {len(row)}"))
            continue
        for name, dom, v in zip(schema.attributes, schema.domains, row):
            if v not in dom:
                out.append(Violation(i, f"value {v!r} not in domain of {name!r}"))
        if label not in schema.class_set:
            out.append(Violation(i, f"label {label!r} not in class set"))
    return out


def class_counts(dataset: Dataset) -> dict[str, int]:
    counts = np.bincount(dataset.y[dataset.y >= 0], minlength=dataset.schema.n_classes)
    return {c: int(n) for c, n in zip(dataset.schema.class_set, counts)}


def ordered_classes(observed: Iterable[str]) -> tuple[str, ...]:
    """Class set for observed labels: default classes first, extras in first-seen order.

    Pads with unused default classes when fewer than two labels are seen.
    """
    seen = list(dict.fromkeys(observed))
    out = [c for c in DEFAULT_CLASSES if c in seen] + [c for c in seen if c not in DEFAULT_CLASSES]
    for c in DEFAULT_CLASSES:
        if len(out) >= 2:
            break
        if c not in out:
            out.append(c)
    return tuple(out)


def infer_schema(attributes: Sequence[str], rows: Sequence[Sequence[str]], labels: Sequence[str],
                 class_set: Sequence[str] | None = None) -> AttributeSchema:
    domains = [tuple(dict.fromkeys(r[a] for r in rows)) for a in range(len(attributes))]
    return AttributeSchema(tuple(attributes), tuple(domains),
                           tuple(class_set) if class_set else ordered_classes(labels))


def dumps_dataset(dataset: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*dataset.schema.attributes, BEHAVIOR_COLUMN])
    for row, label in zip(dataset.rows, dataset.labels):
        w.writerow([*row, label])
    return buf.getvalue()


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    for row, label in zip(dataset.rows, dataset.labels):
        if any(DELIMITER in v for v in (*row, label)):
            raise DatasetFormatError(f"value contains delimiter in row {row!r}")
    Path(path).write_text(dumps_dataset(dataset), encoding="utf-8")


def loads_dataset(text: str, class_set: Sequence[str] | None = None) -> Dataset:
    lines = text.splitlines()
    if not lines:
        raise DatasetFormatError("missing header row")
    header = lines[0].split(DELIMITER)
    if header[-1] != BEHAVIOR_COLUMN:
        raise DatasetFormatError(f"last header column must be {BEHAVIOR_COLUMN!r}")
    attributes = header[:-1]
    rows, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(DELIMITER)
        if len(fields) != len(header):
            raise DatasetFormatError(f"line {lineno}: expected {len(header)} fields, got {len(fields)}")
        rows.append(tuple(fields[:-1]))
        labels.append(fields[-1])
    schema = infer_schema(attributes, rows, labels, class_set)
    return Dataset(schema, tuple(rows), tuple(labels))


def read_dataset(path: str | Path, class_set: Sequence[str] | None = None) -> Dataset:
    return loads_dataset(Path(path).read_text(encoding="utf-8"), class_set)
