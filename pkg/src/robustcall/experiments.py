"""Base-vs-robust comparison grid over the bundled personas."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from . import evaluation, synth


@dataclass(frozen=True)
class GridConfig:
    personas: tuple[str, ...] = ("office_worker", "student", "executive")
    sizes: tuple[int, ...] = (500, 2000, 8000)
    rates: tuple[float, ...] = (0.02, 0.05, 0.10)
    seeds: tuple[int, ...] = tuple(range(10))
    pipeline: evaluation.PipelineConfig = field(default_factory=evaluation.PipelineConfig)


@dataclass(frozen=True)
class Cell:
    persona: str
    size: int
    rate: float
    seed: int
    base_f: float
    robust_f: float
    noise_fraction: float

    @property
    def delta(self) -> float:
        return self.robust_f - self.base_f


@dataclass(frozen=True)
class GridResult:
    cells: tuple[Cell, ...]
    seconds: float

    def pass_rate(self) -> float:
        """Share of cells where robust weighted f-measure >= base."""
        return float(np.mean([c.robust_f >= c.base_f for c in self.cells]))

    def mean_delta(self, rate: float) -> float:
        return float(np.mean([c.delta for c in self.cells if c.rate == rate]))

    def dumps(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["persona", "size", "rate", "seed", "base_wf", "robust_wf", "delta", "noise_fraction"])
        for c in self.cells:
            w.writerow([c.persona, c.size, c.rate, c.seed, f"{c.base_f:.6f}", f"{c.robust_f:.6f}",
                        f"{c.delta:.6f}", f"{c.noise_fraction:.6f}"])
        return buf.getvalue()


def run_grid(config: GridConfig = GridConfig()) -> GridResult:
    """One seeded compare per (persona, size, rate, seed); the seed drives data and folds."""
    t0 = time.perf_counter()
    cells = []
    for name in config.personas:
        persona = synth.persona_by_name(name)
        for n in config.sizes:
            for rate in config.rates:
                for seed in config.seeds:
                    ds, _ = synth.generate(persona, n, rate, seed)
                    cmp = evaluation.compare(ds, config.pipeline, seed)
                    cells.append(Cell(name, n, rate, seed, cmp.base.weighted()["fmeasure"],
                                      cmp.robust.weighted()["fmeasure"], cmp.robust.noise_fraction))
    return GridResult(tuple(cells), time.perf_counter() - t0)
