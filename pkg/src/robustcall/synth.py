"""Synthetic call-behavior personas and label-noise injection with ground truth."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .model import AttributeSchema, Dataset


@dataclass(frozen=True)
class Rule:
    """``conditions`` maps attribute -> admissible values; absent attributes match anything."""

    conditions: tuple[tuple[str, frozenset[str]], ...]
    label: str

    @classmethod
    def of(cls, label: str, **conditions: str | Sequence[str]) -> "Rule":
        conds = tuple(
            (a, frozenset([v]) if isinstance(v, str) else frozenset(v)) for a, v in conditions.items()
        )
        return cls(conds, label)

    def matches(self, context: Mapping[str, str]) -> bool:
        return all(context[a] in vals for a, vals in self.conditions)


@dataclass(frozen=True)
class Persona:
    name: str
    marginals: tuple[tuple[str, tuple[tuple[str, float], ...]], ...]
    rules: tuple[Rule, ...]
    class_set: tuple[str, ...]

    def __post_init__(self) -> None:
        for combo in self.contexts():
            if not any(r.matches(combo) for r in self.rules):
                raise ValueError(f"persona {self.name!r} has no rule for context {combo}")

    @classmethod
    def build(cls, name: str, marginals: Mapping[str, Mapping[str, float]],
              rules: Sequence[Rule], class_set: Sequence[str]) -> "Persona":
        return cls(name, tuple((a, tuple(w.items())) for a, w in marginals.items()), tuple(rules), tuple(class_set))

    @property
    def schema(self) -> AttributeSchema:
        return AttributeSchema(
            tuple(a for a, _ in self.marginals),
            tuple(tuple(v for v, _ in w) for _, w in self.marginals),
            self.class_set,
        )

    def contexts(self):
        names = [a for a, _ in self.marginals]
        for values in itertools.product(*[[v for v, _ in w] for _, w in self.marginals]):
            yield dict(zip(names, values))

    def label(self, context: Mapping[str, str]) -> str:
        """Consequent of the highest-priority matching rule."""
        for r in self.rules:
            if r.matches(context):
                return r.label
        raise KeyError(context)

    def label_table(self) -> np.ndarray:
        """Class code for every context, indexed by the value codes of each attribute."""
        shape = tuple(len(w) for _, w in self.marginals)
        cidx = {c: i for i, c in enumerate(self.class_set)}
        return np.array([cidx[self.label(c)] for c in self.contexts()], dtype=np.int64).reshape(shape)


@dataclass(frozen=True)
class NoiseMask:
    flipped: tuple[int, ...]
    original: tuple[str, ...]
    requested_rate: float
    n: int

    @property
    def realized_rate(self) -> float:
        return len(self.flipped) / self.n

    def as_bool(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[list(self.flipped)] = True
        return m


def noise_count(n: int, rate: float) -> int:
    # guard against 0.29 * 100 == 28.999...
    return int(math.floor(rate * n + 1e-9))


def generate(persona: Persona, n: int, noise_rate: float = 0.0, seed: int = 0) -> tuple[Dataset, NoiseMask]:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= noise_rate < 1.0:
        raise ValueError("noise_rate must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    schema = persona.schema
    cols = []
    for _, weights in persona.marginals:
        p = np.array([w for _, w in weights], dtype=float)
        cols.append(rng.choice(len(p), size=n, p=p / p.sum()))
    X = np.stack(cols, axis=1) if cols else np.zeros((n, 0), dtype=np.int64)
    y = persona.label_table()[tuple(X.T)] if cols else np.zeros(n, dtype=np.int64)
    y = np.array(y, dtype=np.int64)
    k = noise_count(n, noise_rate)
    flipped = np.sort(rng.choice(n, size=k, replace=False)) if k else np.zeros(0, dtype=np.int64)
    originals = y[flipped].copy()
    n_cls = len(persona.class_set)
    # shift by 1..n_cls-1 picks a uniformly random different class
    y[flipped] = (originals + rng.integers(1, n_cls, size=k)) % n_cls
    rows = tuple(tuple(schema.domains[a][v] for a, v in enumerate(r)) for r in X.tolist())
    labels = tuple(persona.class_set[c] for c in y.tolist())
    X.setflags(write=False)
    y.setflags(write=False)
    ds = Dataset(schema, rows, labels, (X.astype(np.int64), y))
    mask = NoiseMask(tuple(flipped.tolist()), tuple(persona.class_set[c] for c in originals.tolist()), noise_rate, n)
    return ds, mask


def naive_bayes_margins(persona: Persona) -> list[tuple[dict[str, str], str, float]]:
    """Per-context log-margin of the true class under naive Bayes fit to expected counts.

    Counts are the exact context probabilities implied by the marginals and
    rules (no sampling, no noise).  A negative margin means naive Bayes
    mislabels that context even on infinite clean data, so a likelihood
    filter would discard every correct instance of it.
    """
    weights = [np.array([w for _, w in ws], dtype=float) for _, ws in persona.marginals]
    weights = [w / w.sum() for w in weights]
    k = len(persona.class_set)
    table = persona.label_table()
    prob = np.ones(table.shape)
    for a, w in enumerate(weights):
        shape = [1] * table.ndim
        shape[a] = len(w)
        prob = prob * w.reshape(shape)
    class_mass = np.array([prob[table == c].sum() for c in range(k)])
    cond = []
    for a in range(table.ndim):
        axes = tuple(i for i in range(table.ndim) if i != a)
        cond.append(np.stack([np.where(table == c, prob, 0.0).sum(axis=axes) for c in range(k)], axis=1))
    out = []
    with np.errstate(divide="ignore"):
        log_prior = np.log(class_mass)
        for context, idx in zip(persona.contexts(), itertools.product(*[range(len(w)) for w in weights])):
            score = log_prior + sum(np.log(cond[a][v] / class_mass) for a, v in enumerate(idx))
            true = int(table[idx])
            margin = float(score[true] - np.delete(score, true).max())
            out.append((context, persona.class_set[true], margin))
    return out


def dumps_mask(mask: NoiseMask) -> str:
    return "id,original_label\n" + "".join(f"{i},{c}\n" for i, c in zip(mask.flipped, mask.original))


def write_mask(mask: NoiseMask, path: str | Path) -> None:
    Path(path).write_text(dumps_mask(mask), encoding="utf-8")


# -- bundled personas ---------------------------------------------------------

OFFICE_RULES = (
    Rule.of("Missed", Location="Home", Relationship="Unknown"),
    Rule.of("Accept", Location="Home", Relationship="Friend"),
    Rule.of("Reject", Location="Office", Situation="Meeting", Relationship="Colleague"),
    Rule.of("Accept", Location="Office", Situation="Meeting", Relationship="Boss"),
    Rule.of("Reject", Location="Office", Situation="Lecture"),
    Rule.of("Missed", Location="Office", Situation="Lunch", Relationship="Unknown"),
    Rule.of("Accept", Location="Office", Situation="Lunch", Relationship="Friend"),
)


def office_worker() -> Persona:
    """The seven-rule office/home persona; contexts outside those rules get filler rules."""
    fillers = (
        Rule.of("Accept", Location="Home"),
        Rule.of("Reject", Location="Office", Situation="Meeting"),
        Rule.of("Accept", Location="Office", Situation="Lunch"),
    )
    return Persona.build(
        "office_worker",
        {
            "Location": {"Home": 1.0, "Office": 3.0},
            "Situation": {"Meeting": 3.0, "Lecture": 2.0, "Lunch": 1.0},
            "Relationship": {"Boss": 3.0, "Friend": 1.0, "Colleague": 1.0, "Unknown": 2.0},
        },
        OFFICE_RULES + fillers,
        ("Accept", "Reject", "Missed"),
    )


def student() -> Persona:
    return Persona.build(
        "student",
        {
            "DayTime": {"Wkday[00:00-06:00]": 0.5, "Wkday[06:00-12:00]": 2.0, "Wkday[12:00-18:00]": 2.0,
                        "Wkday[18:00-24:00]": 1.5, "Wkend[06:00-18:00]": 1.0, "Wkend[18:00-06:00]": 1.0},
            "Location": {"Home": 2.0, "Campus": 2.0, "Library": 1.0, "Transit": 1.0},
            "Situation": {"Class": 1.5, "Study": 1.5, "Free": 2.0, "Sleep": 0.5},
            "Relationship": {"Family": 1.0, "Friend": 2.0, "Classmate": 1.5, "Unknown": 1.0},
        },
        (
            Rule.of("Missed", Situation="Sleep"),
            Rule.of("Reject", Situation="Class", Relationship=["Friend", "Classmate", "Unknown"]),
            Rule.of("Outgoing", Location="Transit", Relationship=["Family", "Friend"]),
            Rule.of("Reject", Relationship="Unknown"),
            Rule.of("Accept"),
        ),
        ("Accept", "Reject", "Missed", "Outgoing"),
    )


def executive() -> Persona:
    """Reject-heavy persona: only a handful of callers get through during work."""
    return Persona.build(
        "executive",
        {
            "DayTime": {"Wkday[06:00-12:00]": 3.0, "Wkday[12:00-18:00]": 3.0, "Wkday[18:00-24:00]": 1.0,
                        "Wkend[00:00-24:00]": 1.0},
            "Location": {"Office": 4.0, "Home": 1.5, "Car": 1.0},
            "Situation": {"Meeting": 3.0, "Desk": 2.0, "Lunch": 1.0, "Dinner": 1.0},
            "Relationship": {"Boss": 1.0, "Colleague": 3.0, "Family": 1.0, "Client": 2.0, "Unknown": 2.0},
        },
        (
            Rule.of("Accept", Relationship="Boss"),
            Rule.of("Accept", Relationship="Family"),
            Rule.of("Missed", Location="Car", Relationship=["Unknown", "Colleague"]),
            Rule.of("Outgoing", Location="Car", Relationship="Client"),
            Rule.of("Reject", Situation="Meeting"),
            Rule.of("Accept", Relationship="Client"),
            Rule.of("Reject"),
        ),
        ("Accept", "Reject", "Missed", "Outgoing"),
    )


def bundled_personas() -> list[Persona]:
    return [office_worker(), student(), executive()]


def persona_by_name(name: str) -> Persona:
    for p in bundled_personas():
        if p.name == name:
            return p
    raise KeyError(f"unknown persona {name!r}; choose from {[p.name for p in bundled_personas()]}")
