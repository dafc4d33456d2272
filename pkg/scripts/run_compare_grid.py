"""Base-vs-robust weighted f-measure over personas x sizes x noise rates x seeds.

    python3 scripts/run_compare_grid.py --out grid.csv
    python3 scripts/run_compare_grid.py --score posterior --sizes 500 2000 --seeds 5
"""

import argparse
from pathlib import Path

from robustcall import evaluation, experiments


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--personas", nargs="+", default=list(experiments.GridConfig.personas))
    ap.add_argument("--sizes", nargs="+", type=int, default=list(experiments.GridConfig.sizes))
    ap.add_argument("--rates", nargs="+", type=float, default=list(experiments.GridConfig.rates))
    ap.add_argument("--seeds", type=int, default=10, help="seeds 0..N-1")
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--score", choices=("likelihood", "posterior"), default="likelihood")
    ap.add_argument("--out", type=Path, default=None, help="per-cell CSV")
    args = ap.parse_args()

    cfg = experiments.GridConfig(tuple(args.personas), tuple(args.sizes), tuple(args.rates),
                                 tuple(range(args.seeds)),
                                 evaluation.PipelineConfig(folds=args.folds, score_kind=args.score))
    result = experiments.run_grid(cfg)
    if args.out:
        args.out.write_text(result.dumps(), encoding="utf-8")
    print(f"cells: {len(result.cells)}  time: {result.seconds:.1f}s  score: {args.score}")
    print(f"robust >= base in {result.pass_rate():.1%} of cells")
    for rate in cfg.rates:
        print(f"  rate {rate:.0%}: mean delta {result.mean_delta(rate):+.5f}")
    worst = sorted(result.cells, key=lambda c: c.delta)[:5]
    print("lowest deltas:")
    for c in worst:
        print(f"  {c.persona} n={c.size} rate={c.rate} seed={c.seed}: {c.delta:+.5f}")


if __name__ == "__main__":
    main()
