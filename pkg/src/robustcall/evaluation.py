"""Precision/recall/f-measure, k-fold cross-validation, base-vs-robust comparison."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from . import noise
from .model import Dataset
from .tree import TreeParams, build_tree, predict_dataset

Variant = Literal["base", "robust"]
METRICS = ("precision", "recall", "fmeasure")


@dataclass(frozen=True)
class ConfusionCounts:
    class_set: tuple[str, ...]
    tp: tuple[int, ...]
    fp: tuple[int, ...]
    fn: tuple[int, ...]
    total: int

    @classmethod
    def from_codes(cls, class_set, y_true, y_pred) -> "ConfusionCounts":
        k = len(class_set)
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        cm = np.bincount(y_true * k + y_pred, minlength=k * k).reshape(k, k)
        tp = np.diag(cm)
        return cls(tuple(class_set), tuple(tp.tolist()), tuple((cm.sum(axis=0) - tp).tolist()),
                   tuple((cm.sum(axis=1) - tp).tolist()), len(y_true))

    @classmethod
    def from_labels(cls, class_set, y_true, y_pred) -> "ConfusionCounts":
        idx = {c: i for i, c in enumerate(class_set)}
        return cls.from_codes(class_set, [idx[c] for c in y_true], [idx[c] for c in y_pred])

    def _i(self, label: str) -> int:
        return self.class_set.index(label)

    def support(self, label: str) -> int:
        i = self._i(label)
        return self.tp[i] + self.fn[i]

    @property
    def accuracy(self) -> float:
        return sum(self.tp) / self.total if self.total else 0.0


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def precision(counts: ConfusionCounts, label: str) -> float:
    i = counts._i(label)
    return _ratio(counts.tp[i], counts.tp[i] + counts.fp[i])


def recall(counts: ConfusionCounts, label: str) -> float:
    i = counts._i(label)
    return _ratio(counts.tp[i], counts.tp[i] + counts.fn[i])


def fmeasure(counts: ConfusionCounts, label: str) -> float:
    p, r = precision(counts, label), recall(counts, label)
    return _ratio(2 * p * r, p + r)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    test_ids: tuple[int, ...]
    counts: ConfusionCounts
    noise_fraction: float = 0.0
    fallback: bool = False

    def per_class(self) -> dict[str, dict[str, float]]:
        c = self.counts
        return {
            label: {"precision": precision(c, label), "recall": recall(c, label),
                    "fmeasure": fmeasure(c, label), "support": c.support(label)}
            for label in c.class_set
        }

    def weighted(self) -> dict[str, float]:
        """Support-weighted average over classes present in the test fold."""
        pc = self.per_class()
        tot = sum(v["support"] for v in pc.values())
        return {m: _ratio(sum(v[m] * v["support"] for v in pc.values()), tot) for m in METRICS}

    def macro(self) -> dict[str, float]:
        pc = self.per_class()
        return {m: sum(v[m] for v in pc.values()) / len(pc) for m in METRICS}


@dataclass(frozen=True)
class EvalReport:
    variant: str
    seed: int
    folds: tuple[FoldResult, ...]
    score_kind: str = "likelihood"

    def _mean(self, get) -> float:
        return float(np.mean([get(f) for f in self.folds]))

    def weighted(self) -> dict[str, float]:
        return {m: self._mean(lambda f: f.weighted()[m]) for m in METRICS}

    def macro(self) -> dict[str, float]:
        return {m: self._mean(lambda f: f.macro()[m]) for m in METRICS}

    def per_class(self) -> dict[str, dict[str, float]]:
        labels = self.folds[0].counts.class_set
        return {c: {m: self._mean(lambda f: f.per_class()[c][m]) for m in METRICS} for c in labels}

    @property
    def accuracy(self) -> float:
        return self._mean(lambda f: f.counts.accuracy)

    @property
    def noise_fraction(self) -> float:
        return self._mean(lambda f: f.noise_fraction)

    def summary(self) -> dict:
        return {
            "variant": self.variant,
            "seed": self.seed,
            "folds": len(self.folds),
            "accuracy": self.accuracy,
            "weighted": self.weighted(),
            "macro": self.macro(),
            "noise_fraction": self.noise_fraction,
            "fallback_folds": [f.fold for f in self.folds if f.fallback],
        }


def fold_indices(n: int, folds: int = 10, seed: int = 0, labels: np.ndarray | None = None) -> list[np.ndarray]:
    """Test-index arrays for each fold after a seeded shuffle.

    With ``labels`` given, instances are dealt round-robin class by class
    (stratified); otherwise the shuffled order is cut into near-equal runs.
    """
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if n < folds:
        raise ValueError(f"{n} instances cannot fill {folds} folds")
    perm = np.random.default_rng(seed).permutation(n)
    if labels is None:
        parts = np.array_split(perm, folds)
    else:
        order = perm[np.argsort(np.asarray(labels)[perm], kind="stable")]
        parts = [order[i::folds] for i in range(folds)]
    return [np.sort(p) for p in parts]


def kfold_split(dataset: Dataset, folds: int = 10, seed: int = 0,
                stratified: bool = False) -> list[tuple[Dataset, Dataset]]:
    tests = fold_indices(len(dataset), folds, seed, dataset.y if stratified else None)
    out = []
    for test in tests:
        mask = np.ones(len(dataset), dtype=bool)
        mask[test] = False
        out.append((dataset.take(np.flatnonzero(mask)), dataset.take(test)))
    return out


@dataclass(frozen=True)
class PipelineConfig:
    folds: int = 10
    tree: TreeParams = field(default_factory=TreeParams)
    score_kind: noise.ScoreKind = "likelihood"
    stratified: bool = False


def _run_fold(dataset: Dataset, test: np.ndarray, fold: int, variant: Variant,
              config: PipelineConfig) -> FoldResult:
    mask = np.ones(len(dataset), dtype=bool)
    mask[test] = False
    train = dataset.take(np.flatnonzero(mask))
    noise_fraction, fallback = 0.0, False
    if variant == "robust":
        flagged = noise.noise_mask(train, config.score_kind)
        noise_fraction = float(flagged.mean())
        if flagged.all():
            fallback = True
        elif flagged.any():
            train = train.take(np.flatnonzero(~flagged))
    elif variant != "base":
        raise ValueError(f"unknown variant {variant!r}")
    tree = build_tree(train, config.tree)
    test_ds = dataset.take(test)
    counts = ConfusionCounts.from_codes(dataset.schema.class_set, test_ds.y, predict_dataset(tree, test_ds))
    return FoldResult(fold, tuple(test.tolist()), counts, noise_fraction, fallback)


def run_pipeline(dataset: Dataset, variant: Variant = "robust", config: PipelineConfig = PipelineConfig(),
                 seed: int = 0) -> EvalReport:
    """k-fold evaluation; the robust variant filters noise inside each training fold only."""
    tests = fold_indices(len(dataset), config.folds, seed, dataset.y if config.stratified else None)
    results = tuple(_run_fold(dataset, t, i, variant, config) for i, t in enumerate(tests))
    return EvalReport(variant, seed, results, config.score_kind)


@dataclass(frozen=True)
class CompareReport:
    base: EvalReport
    robust: EvalReport

    def deltas(self) -> dict[str, float]:
        out = {"accuracy": self.robust.accuracy - self.base.accuracy}
        for avg in ("weighted", "macro"):
            b, r = getattr(self.base, avg)(), getattr(self.robust, avg)()
            for m in METRICS:
                out[f"{avg}_{m}"] = r[m] - b[m]
        return out


def compare(dataset: Dataset, config: PipelineConfig = PipelineConfig(), seed: int = 0) -> CompareReport:
    return CompareReport(run_pipeline(dataset, "base", config, seed), run_pipeline(dataset, "robust", config, seed))


# -- exports ------------------------------------------------------------------

def _f(x: float) -> str:
    return f"{x:.6f}"


def dumps_eval_report(report: EvalReport) -> str:
    buf = io.StringIO()
    buf.write("variant,fold,class,precision,recall,fmeasure,support,noise_fraction,fallback\n")

    def row(fold, cls, vals, support, nf, fb):
        buf.write(f"{report.variant},{fold},{cls},{_f(vals['precision'])},{_f(vals['recall'])},"
                  f"{_f(vals['fmeasure'])},{support},{_f(nf)},{fb}\n")

    for f in report.folds:
        pc = f.per_class()
        for c, vals in pc.items():
            row(f.fold, c, vals, vals["support"], f.noise_fraction, int(f.fallback))
        n = len(f.test_ids)
        row(f.fold, "weighted", f.weighted(), n, f.noise_fraction, int(f.fallback))
        row(f.fold, "macro", f.macro(), n, f.noise_fraction, int(f.fallback))
    total = sum(len(f.test_ids) for f in report.folds)
    nfb = sum(f.fallback for f in report.folds)
    for c, vals in report.per_class().items():
        row("mean", c, vals, "", report.noise_fraction, nfb)
    row("mean", "weighted", report.weighted(), total, report.noise_fraction, nfb)
    row("mean", "macro", report.macro(), total, report.noise_fraction, nfb)
    return buf.getvalue()


def summary_line(report: EvalReport) -> str:
    return json.dumps(report.summary(), sort_keys=True)


def dumps_compare(cmp: CompareReport) -> str:
    buf = io.StringIO()
    buf.write("metric,base,robust,delta\n")
    b_all = {"accuracy": cmp.base.accuracy,
             **{f"weighted_{m}": v for m, v in cmp.base.weighted().items()},
             **{f"macro_{m}": v for m, v in cmp.base.macro().items()}}
    r_all = {"accuracy": cmp.robust.accuracy,
             **{f"weighted_{m}": v for m, v in cmp.robust.weighted().items()},
             **{f"macro_{m}": v for m, v in cmp.robust.macro().items()}}
    for name, d in cmp.deltas().items():
        buf.write(f"{name},{_f(b_all[name])},{_f(r_all[name])},{_f(d)}\n")
    buf.write(f"noise_fraction,{_f(0.0)},{_f(cmp.robust.noise_fraction)},{_f(cmp.robust.noise_fraction)}\n")
    return buf.getvalue()


def write_text(text: str, path: str | Path) -> None:
    Path(path).write_text(text, encoding="utf-8")
