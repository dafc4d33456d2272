"""Categorical naive Bayes with add-one (Laplace) smoothing.

Counts are kept as exact integers.  ``prior`` and ``conditional`` return
``Fraction`` objects; the batch scorers work in log-space with numpy.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np

from .model import AttributeSchema, Dataset, Instance

Smoothing = Literal["none", "laplace"]


def log_close(a: float, b: float) -> bool:
    """Equality of two log-scores up to floating evaluation error."""
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))


@dataclass(frozen=True, eq=False)
class BayesModel:
    schema: AttributeSchema
    class_counts: np.ndarray  # (n_classes,)
    total: int
    # one (domain size + 1, n_classes) table per attribute; the last row is
    # all zeros so that out-of-domain code -1 indexes a zero count
    cond_counts: tuple[np.ndarray, ...]
    value_cardinality: tuple[int, ...]

    def count(self, attribute: str, value: str, label: str) -> int:
        a = self.schema.index(attribute)
        c = self.schema.class_index(label)
        v = self.schema._value_codes[a].get(value, -1)
        return int(self.cond_counts[a][v, c])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BayesModel):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.total == other.total
            and self.value_cardinality == other.value_cardinality
            and np.array_equal(self.class_counts, other.class_counts)
            and all(np.array_equal(a, b) for a, b in zip(self.cond_counts, other.cond_counts))
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def priors_smoothed(self) -> bool:
        return bool((self.class_counts == 0).any())


def fit(dataset: Dataset) -> BayesModel:
    if len(dataset) == 0:
        raise ValueError("cannot fit a naive Bayes model on an empty dataset")
    schema = dataset.schema
    X, y = dataset.X, dataset.y
    if (y < 0).any():
        raise ValueError("dataset has labels outside the class set")
    k = schema.n_classes
    class_counts = np.bincount(y, minlength=k)
    tables, cards = [], []
    for a, dom in enumerate(schema.domains):
        col = X[:, a]
        if (col < 0).any():
            raise ValueError(f"attribute {schema.attributes[a]!r} has out-of-domain training values")
        nv = len(dom)
        table = np.zeros((nv + 1, k), dtype=np.int64)
        table[:nv] = np.bincount(col * k + y, minlength=nv * k).reshape(nv, k)
        table.setflags(write=False)
        tables.append(table)
        cards.append(int(np.count_nonzero(table.sum(axis=1))))
    class_counts.setflags(write=False)
    return BayesModel(schema, class_counts, len(dataset), tuple(tables), tuple(cards))


def prior(model: BayesModel, label: str) -> Fraction:
    """Class prior; add-one smoothed over all classes only if some class is empty."""
    c = model.schema.class_index(label)
    n_c = int(model.class_counts[c])
    if model.priors_smoothed:
        return Fraction(n_c + 1, model.total + model.schema.n_classes)
    return Fraction(n_c, model.total)


def conditional(model: BayesModel, attribute: str, value: str, label: str,
                smoothing: Smoothing = "none") -> Fraction:
    a = model.schema.index(attribute)
    c = model.schema.class_index(label)
    count = model.count(attribute, value, label)
    n_c = int(model.class_counts[c])
    if smoothing == "laplace":
        return Fraction(count + 1, n_c + model.value_cardinality[a])
    if smoothing != "none":
        raise ValueError(f"unknown smoothing {smoothing!r}")
    if n_c == 0:
        raise ZeroDivisionError(f"class {label!r} has no training instances")
    return Fraction(count, n_c)


def _gather(model: BayesModel, X: np.ndarray) -> np.ndarray:
    """Per-attribute counts for every (instance, class): shape (n, m, k)."""
    n, m = X.shape
    out = np.empty((n, m, model.schema.n_classes), dtype=np.int64)
    for a in range(m):
        out[:, a, :] = model.cond_counts[a][X[:, a]]
    return out


def log_likelihoods(model: BayesModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log P(x|C) for every row of ``X`` and every class, with smoothed flags.

    A class's product is recomputed with Laplace smoothing on every factor
    as soon as one unsmoothed factor is zero.  Returns two (n, k) arrays.
    """
    X = np.asarray(X, dtype=np.int64).reshape(len(X), model.schema.n_attributes)
    n, m = X.shape
    k = model.schema.n_classes
    if m == 0:
        return np.zeros((n, k)), np.zeros((n, k), dtype=bool)
    counts = _gather(model, X)
    n_c = model.class_counts.astype(float)
    cards = np.asarray(model.value_cardinality, dtype=float)
    smoothed = (counts == 0).any(axis=1) | (n_c == 0)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.log(counts).sum(axis=1) - m * np.log(n_c)[None, :]
    lap = np.log(counts + 1.0).sum(axis=1) - np.log(n_c[None, :] + cards[:, None]).sum(axis=0)[None, :]
    return np.where(smoothed, lap, raw), smoothed


def log_priors(model: BayesModel) -> np.ndarray:
    n_c = model.class_counts.astype(float)
    if model.priors_smoothed:
        return np.log(n_c + 1.0) - math.log(model.total + model.schema.n_classes)
    with np.errstate(divide="ignore"):
        return np.log(n_c) - math.log(model.total)


def argmax_first(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax where near-equal scores count as ties and the first wins."""
    best = scores.max(axis=1, keepdims=True)
    tol = 1e-9 * np.maximum(1.0, np.abs(best))
    return np.argmax(scores >= best - tol, axis=1)


def predict_codes(model: BayesModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predicted class codes and their log posterior scores for encoded rows."""
    ll, _ = log_likelihoods(model, X)
    post = ll + log_priors(model)[None, :]
    pred = argmax_first(post)
    return pred, post[np.arange(len(pred)), pred]


def _encode_instance(model: BayesModel, instance: Instance | tuple) -> np.ndarray:
    values = instance.values if isinstance(instance, Instance) else instance
    return model.schema.encode_values(values).reshape(1, -1)


def likelihood(model: BayesModel, instance: Instance | tuple, label: str) -> tuple[float, bool]:
    """(log P(x|label), smoothed-flag) for a single instance."""
    c = model.schema.class_index(label)
    ll, sm = log_likelihoods(model, _encode_instance(model, instance))
    return float(ll[0, c]), bool(sm[0, c])


def predict(model: BayesModel, instance: Instance | tuple) -> tuple[str, float]:
    """Most probable class and its log score log P(x|C) + log P(C)."""
    pred, score = predict_codes(model, _encode_instance(model, instance))
    return model.schema.class_set[int(pred[0])], float(score[0])


# -- audit dump ---------------------------------------------------------------

def dumps_model(model: BayesModel) -> str:
    """All count tables as comma-separated ``kind,attribute,value,class,count`` rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "attribute", "value", "class", "count"])
    w.writerow(["total", "", "", "", model.total])
    for c, n in zip(model.schema.class_set, model.class_counts):
        w.writerow(["class", "", "", c, int(n)])
    for a, name in enumerate(model.schema.attributes):
        w.writerow(["cardinality", name, "", "", model.value_cardinality[a]])
        for v, value in enumerate(model.schema.domains[a]):
            for c, label in enumerate(model.schema.class_set):
                w.writerow(["cond", name, value, label, int(model.cond_counts[a][v, c])])
    return buf.getvalue()


def loads_model(text: str) -> BayesModel:
    rows = list(csv.reader(io.StringIO(text)))[1:]
    classes, attrs, domains = [], [], {}
    total, class_counts, cards, cells = 0, {}, {}, {}
    for kind, attr, value, label, count in rows:
        n = int(count)
        if kind == "total":
            total = n
        elif kind == "class":
            classes.append(label)
            class_counts[label] = n
        elif kind == "cardinality":
            attrs.append(attr)
            domains[attr] = []
            cards[attr] = n
        elif kind == "cond":
            if value not in domains[attr]:
                domains[attr].append(value)
            cells[attr, value, label] = n
        else:
            raise ValueError(f"unknown row kind {kind!r}")
    schema = AttributeSchema(tuple(attrs), tuple(tuple(domains[a]) for a in attrs), tuple(classes))
    k = len(classes)
    tables = []
    for a in attrs:
        t = np.zeros((len(domains[a]) + 1, k), dtype=np.int64)
        for v, value in enumerate(domains[a]):
            for c, label in enumerate(classes):
                t[v, c] = cells[a, value, label]
        t.setflags(write=False)
        tables.append(t)
    cc = np.array([class_counts[c] for c in classes], dtype=np.int64)
    cc.setflags(write=False)
    return BayesModel(schema, cc, total, tuple(tables), tuple(cards[a] for a in attrs))


def write_model(model: BayesModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")
