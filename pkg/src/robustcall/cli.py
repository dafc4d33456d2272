"""Command-line pipeline: preprocess -> detect-noise -> train -> evaluate / compare, plus synth."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bayes, evaluation, ingest, noise, synth, tree
from .model import Dataset, class_counts, read_dataset, validate, write_dataset


@dataclass(frozen=True)
class RunConfig:
    input: Path
    output: Path
    seed: int | None = None
    folds: int = 10
    variant: str = "robust"
    score: str = "likelihood"
    tree: tree.TreeParams = field(default_factory=tree.TreeParams)
    segmentation: ingest.SegmentationConfig = field(default_factory=ingest.SegmentationConfig)

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ValueError("--folds must be >= 2")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        seg = ingest.SegmentationConfig.parse(getattr(args, "segments", None) or "06:00,12:00,18:00,24:00",
                                              getattr(args, "day_granularity", "day-of-week"))
        return cls(
            input=Path(args.input) if getattr(args, "input", None) else Path(),
            output=Path(args.output),
            seed=getattr(args, "seed", None),
            folds=getattr(args, "folds", 10),
            variant=getattr(args, "variant", "robust"),
            score=getattr(args, "score", "likelihood"),
            tree=tree.TreeParams(getattr(args, "min_leaf", 1), getattr(args, "max_depth", None)),
            segmentation=seg,
        )

    def pipeline(self) -> evaluation.PipelineConfig:
        return evaluation.PipelineConfig(self.folds, self.tree, self.score)  # type: ignore[arg-type]


class CommandError(Exception):
    pass


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _load(cfg: RunConfig) -> Dataset:
    if not cfg.input.is_file():
        raise CommandError(f"no such file: {cfg.input}")
    ds = read_dataset(cfg.input)
    problems = validate(ds)
    if problems:
        raise CommandError(f"{cfg.input}: instance {problems[0].instance_id}: {problems[0].reason}")
    return ds


def _distribution(ds: Dataset) -> str:
    return " ".join(f"{c}={n}" for c, n in class_counts(ds).items())


def cmd_preprocess(cfg: RunConfig, registry_path: Path | None = None) -> int:
    if not cfg.input.is_file():
        raise CommandError(f"no such file: {cfg.input}")
    events = ingest.read_call_log(cfg.input)
    if not events:
        _warn(f"{cfg.input} holds no call events; writing an empty dataset")
    registry = ingest.RelationshipRegistry()
    ds = ingest.build_dataset(events, cfg.segmentation, registry)
    write_dataset(ds, cfg.output)
    reg_path = registry_path or cfg.output.with_name(cfg.output.stem + ".registry.csv")
    reg_path.write_text(registry.dumps(), encoding="utf-8")
    print(f"instances: {len(ds)}")
    print(f"classes: {_distribution(ds)}")
    return 0


def cmd_detect_noise(cfg: RunConfig) -> int:
    ds = _load(cfg)
    if len(ds) == 0:
        raise CommandError("dataset is empty")
    report = noise.detect_noise(ds, cfg.score)  # type: ignore[arg-type]
    noise.write_report(report, cfg.output)
    t = report.threshold
    print(f"T_noise: log={t!r} prob={math.exp(t) if t > -math.inf else 0.0!r}")
    print(f"noise_count: {len(report.noise_ids)}")
    print(f"noise_fraction: {report.noise_fraction!r}")
    return 0


def cmd_train(cfg: RunConfig) -> int:
    ds = _load(cfg)
    if len(ds) == 0:
        raise CommandError("dataset is empty")
    cfg.output.mkdir(parents=True, exist_ok=True)
    if cfg.variant == "robust":
        report = noise.detect_noise(ds, cfg.score)  # type: ignore[arg-type]
        noise.write_report(report, cfg.output / "noise_report.csv")
        print(f"noise_count: {len(report.noise_ids)} noise_fraction: {report.noise_fraction!r}")
        quality = noise.eliminate(ds, report)
        if len(quality) == 0:
            _warn("noise elimination removed every instance; training on the raw data")
        else:
            ds = quality
    t = tree.build_tree(ds, cfg.tree)
    rules = tree.extract_rules(t)
    tree.write_tree(t, cfg.output / "tree.txt")
    tree.write_rules(rules, cfg.output / "rules.txt")
    bayes.write_model(bayes.fit(ds), cfg.output / "bayes_model.csv")
    print(f"training_instances: {len(ds)} rules: {len(rules)}")
    return 0


def _require_seed(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise CommandError("--seed is required")
    return cfg.seed


def cmd_evaluate(cfg: RunConfig) -> int:
    seed = _require_seed(cfg)
    ds = _load(cfg)
    if len(ds) < cfg.folds:
        raise CommandError(f"{len(ds)} instances cannot fill {cfg.folds} folds")
    report = evaluation.run_pipeline(ds, cfg.variant, cfg.pipeline(), seed)  # type: ignore[arg-type]
    evaluation.write_text(evaluation.dumps_eval_report(report), cfg.output)
    for f in report.folds:
        if f.fallback:
            _warn(f"fold {f.fold}: every training instance was flagged; used the raw training fold")
    print(evaluation.summary_line(report))
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    seed = _require_seed(cfg)
    ds = _load(cfg)
    if len(ds) < cfg.folds:
        raise CommandError(f"{len(ds)} instances cannot fill {cfg.folds} folds")
    cmp = evaluation.compare(ds, cfg.pipeline(), seed)
    cfg.output.mkdir(parents=True, exist_ok=True)
    evaluation.write_text(evaluation.dumps_eval_report(cmp.base), cfg.output / "base.csv")
    evaluation.write_text(evaluation.dumps_eval_report(cmp.robust), cfg.output / "robust.csv")
    evaluation.write_text(evaluation.dumps_compare(cmp), cfg.output / "compare.csv")
    print(evaluation.summary_line(cmp.base))
    print(evaluation.summary_line(cmp.robust))
    print(json.dumps({"deltas": cmp.deltas()}, sort_keys=True))
    return 0


def cmd_synth(cfg: RunConfig, persona: str, n: int, noise_rate: float, mask_path: Path | None) -> int:
    seed = _require_seed(cfg)
    try:
        p = synth.persona_by_name(persona)
    except KeyError as e:
        raise CommandError(str(e.args[0])) from None
    ds, mask = synth.generate(p, n, noise_rate, seed)
    write_dataset(ds, cfg.output)
    synth.write_mask(mask, mask_path or cfg.output.with_name(cfg.output.stem + ".mask.csv"))
    print(f"instances: {len(ds)} flipped: {len(mask.flipped)}")
    print(f"classes: {_distribution(ds)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustcall", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
        if needs_input:
            p.add_argument("--input", required=True)
        p.add_argument("--output", required=True)
        p.add_argument("--score", choices=("likelihood", "posterior"), default="likelihood",
                       help="noise score: log P(x|C) or log P(x|C)P(C)")

    def tree_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--min-leaf", type=int, default=1)
        p.add_argument("--max-depth", type=int, default=None)

    p = sub.add_parser("preprocess", help="raw call log -> categorical dataset")
    common(p)
    p.add_argument("--segments", default="06:00,12:00,18:00,24:00",
                   help="comma-separated segment end times")
    p.add_argument("--day-granularity", choices=("day-of-week", "weekday/weekend"), default="day-of-week")
    p.add_argument("--registry", default=None, help="relationship registry dump path")

    p = sub.add_parser("detect-noise", help="flag noisy training instances")
    common(p)

    p = sub.add_parser("train", help="(optionally filter and) grow the tree; write tree and rules")
    common(p)
    p.add_argument("--variant", choices=("base", "robust"), default="robust")
    tree_flags(p)

    for name, text in (("evaluate", "k-fold evaluation of one variant"),
                       ("compare", "k-fold base vs robust on identical folds")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--folds", type=int, default=10)
        if name == "evaluate":
            p.add_argument("--variant", choices=("base", "robust"), default="robust")
        tree_flags(p)

    p = sub.add_parser("synth", help="generate a persona dataset with injected label noise")
    common(p, needs_input=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--persona", default="office_worker")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.add_argument("--mask", default=None, help="noise mask output path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        if args.command == "preprocess":
            return cmd_preprocess(cfg, Path(args.registry) if args.registry else None)
        if args.command == "detect-noise":
            return cmd_detect_noise(cfg)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "synth":
            return cmd_synth(cfg, args.persona, args.n, args.noise_rate, Path(args.mask) if args.mask else None)
    except (CommandError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
