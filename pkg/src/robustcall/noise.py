"""Dynamic-threshold label-noise detection driven by naive Bayes scores.

Every training instance is scored under its own label.  Instances the
classifier gets right ("pure") calibrate the threshold: the lowest pure
score.  Misclassified instances scoring strictly below it are noise.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from . import bayes
from .bayes import BayesModel, log_close
from .model import Dataset

ScoreKind = Literal["likelihood", "posterior"]


@dataclass(frozen=True)
class InstanceScore:
    instance_id: int
    predicted: str
    true_label: str
    score: float
    smoothed: bool

    @property
    def status(self) -> str:
        return "pure" if self.predicted == self.true_label else "misclassified"


@dataclass(frozen=True)
class ProbabilityGroup:
    score: float
    members: tuple[int, ...]


@dataclass(frozen=True)
class NoiseReport:
    scores: tuple[InstanceScore, ...]
    threshold: float
    noise_ids: tuple[int, ...]
    groups: tuple[ProbabilityGroup, ...]
    score_kind: ScoreKind = "likelihood"

    @property
    def noise_fraction(self) -> float:
        return len(self.noise_ids) / len(self.scores) if self.scores else 0.0

    @property
    def misclassified_ids(self) -> tuple[int, ...]:
        return tuple(s.instance_id for s in self.scores if s.status == "misclassified")


def _score_arrays(model: BayesModel, dataset: Dataset, kind: ScoreKind):
    X, y = dataset.X, dataset.y
    ll, smoothed = bayes.log_likelihoods(model, X)
    post = ll + bayes.log_priors(model)[None, :]
    pred = bayes.argmax_first(post)
    rows = np.arange(len(y))
    table = ll if kind == "likelihood" else post
    return pred, table[rows, y], smoothed[rows, y]


def score_instances(model: BayesModel, dataset: Dataset, kind: ScoreKind = "likelihood") -> list[InstanceScore]:
    """Score each instance under its true label.

    ``kind="likelihood"`` uses log P(x|C_true); ``"posterior"`` adds log P(C_true).
    """
    if kind not in ("likelihood", "posterior"):
        raise ValueError(f"unknown score kind {kind!r}")
    pred, score, smoothed = _score_arrays(model, dataset, kind)
    classes = dataset.schema.class_set
    return [
        InstanceScore(i, classes[p], label, s, sm)
        for i, (p, label, s, sm) in enumerate(zip(pred.tolist(), dataset.labels, score.tolist(), smoothed.tolist()))
    ]


def partition(scores: Sequence[InstanceScore]) -> tuple[list[InstanceScore], list[InstanceScore]]:
    pure = [s for s in scores if s.status == "pure"]
    mis = [s for s in scores if s.status != "pure"]
    return pure, mis


def group_by_probability(scores: Sequence[InstanceScore]) -> list[ProbabilityGroup]:
    """Group instances sharing one score, in ascending score order."""
    ordered = sorted(scores, key=lambda s: (s.score, s.instance_id))
    groups: list[tuple[float, list[int]]] = []
    for s in ordered:
        if groups and log_close(groups[-1][0], s.score):
            groups[-1][1].append(s.instance_id)
        else:
            groups.append((s.score, [s.instance_id]))
    return [ProbabilityGroup(rep, tuple(sorted(ids))) for rep, ids in groups]


def noise_threshold(pure: Sequence[InstanceScore] | Sequence[float]) -> float:
    """Lowest pure score, or -inf when nothing was classified correctly."""
    values = [s.score if isinstance(s, InstanceScore) else s for s in pure]
    return min(values, default=-math.inf)


def below(score: float, threshold: float) -> bool:
    """Strict ``score < threshold``; scores equal up to rounding are not below."""
    return score < threshold and not log_close(score, threshold)


def detect_noise(dataset: Dataset, kind: ScoreKind = "likelihood") -> NoiseReport:
    if len(dataset) == 0:
        raise ValueError("cannot detect noise in an empty dataset")
    model = bayes.fit(dataset)
    scores = score_instances(model, dataset, kind)
    pure, mis = partition(scores)
    t = noise_threshold(pure)
    noise = tuple(s.instance_id for s in mis if below(s.score, t))
    return NoiseReport(tuple(scores), t, noise, tuple(group_by_probability(scores)), kind)


def noise_mask(dataset: Dataset, kind: ScoreKind = "likelihood") -> np.ndarray:
    """Boolean noise flags only; same rule as ``detect_noise`` without the report objects."""
    if len(dataset) == 0:
        raise ValueError("cannot detect noise in an empty dataset")
    model = bayes.fit(dataset)
    pred, score, _ = _score_arrays(model, dataset, kind)
    pure = pred == dataset.y
    if not pure.any():
        return np.zeros(len(dataset), dtype=bool)
    t = float(score[pure].min())
    tol = 1e-9 * np.maximum(1.0, np.maximum(np.abs(score), abs(t)))
    return ~pure & (score < t) & ~(np.abs(score - t) <= tol)


def eliminate(dataset: Dataset, report: NoiseReport | Sequence[int]) -> Dataset:
    """Quality dataset: the input minus the flagged ids, order kept, ids renumbered."""
    ids = report.noise_ids if isinstance(report, NoiseReport) else tuple(report)
    if isinstance(report, NoiseReport) and len(report.scores) != len(dataset):
        raise ValueError("noise report was produced from a different dataset")
    drop = np.zeros(len(dataset), dtype=bool)
    for i in ids:
        if not 0 <= i < len(dataset):
            raise ValueError(f"noise id {i} out of range for dataset of size {len(dataset)}")
        drop[i] = True
    return dataset.take(np.flatnonzero(~drop))


def dumps_report(report: NoiseReport) -> str:
    flagged = set(report.noise_ids)
    buf = io.StringIO()
    t = report.threshold
    p = math.exp(t) if t > -math.inf else 0.0
    buf.write(f"# T_noise={t!r} T_noise_prob={p!r} noise_fraction={report.noise_fraction!r} "
              f"noise_count={len(report.noise_ids)} score={report.score_kind}\n")
    buf.write("instance_id,true_label,predicted,log_score,smoothed,status,flagged\n")
    for s in report.scores:
        buf.write(f"{s.instance_id},{s.true_label},{s.predicted},{s.score!r},"
                  f"{int(s.smoothed)},{s.status},{int(s.instance_id in flagged)}\n")
    return buf.getvalue()


def write_report(report: NoiseReport, path: str | Path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")
