"""Command line interface.

Subcommands mirror the pipeline stages; `pipeline` composes them and
`noise-sweep` refits across noise levels 1..4.  All commands take a JSON
config (--config) and optionally override the output directory and the
noise seed.
"""

import argparse
import sys

from .config import load_config, override
from .exceptions import BeamLoewnerError
from .pipeline import (
    run_analyze,
    run_fit,
    run_noise_sweep,
    run_pipeline,
    run_sample,
    write_samples_csv,
    SAMPLES_CSV,
)


def _add_common(sub, plots_flag=False):
    sub.add_argument("--config", required=True, help="path to the experiment JSON config")
    sub.add_argument("--output", default=None, help="override the config's output_dir")
    sub.add_argument("--seed", type=int, default=None, help="override the noise seed")
    if plots_flag:
        sub.add_argument(
            "--plots",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="render PNG figures next to the CSV output",
        )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="beamloewner",
        description="Sample the beam-shaker transfer function and fit "
                    "reduced rational models from the samples.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser("sample", help="write samples.csv for the config grid"))
    _add_common(subs.add_parser("fit", help="fit a reduced model from samples.csv"))
    _add_common(
        subs.add_parser("analyze", help="poles/error reports for a fitted model"),
        plots_flag=True,
    )
    _add_common(
        subs.add_parser("pipeline", help="run sample, fit and analyze in one go"),
        plots_flag=True,
    )
    _add_common(
        subs.add_parser("noise-sweep", help="refit on noisy data for nu = 1..4"),
        plots_flag=True,
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = override(cfg, output_dir=args.output, seed=args.seed)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)

        if args.command == "sample":
            data = run_sample(cfg)
            write_samples_csv(cfg.output_dir / SAMPLES_CSV, data)
            print(f"wrote {cfg.output_dir / SAMPLES_CSV} ({len(data)} samples)")
        elif args.command == "fit":
            model = run_fit(cfg)
            print(f"fitted model of order {model.order} -> {cfg.output_dir}")
        elif args.command == "analyze":
            summary = run_analyze(cfg, render_plots=args.plots)
            _print_summary(summary)
        elif args.command == "pipeline":
            summary = run_pipeline(cfg, render_plots=args.plots)
            _print_summary(summary)
        elif args.command == "noise-sweep":
            sweep = run_noise_sweep(cfg, render_plots=args.plots)
            for level in sweep["levels"]:
                print(
                    f"nu={level['nu']}: stagnation index {level['stagnation_index']}, "
                    f"order {level['order']}, max |H - H_model| {level['max_abs_err']:.3e}, "
                    f"stable={level['stable']}"
                )
            print(f"wrote sweep summary -> {cfg.output_dir}")
    except BeamLoewnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _print_summary(summary):
    print(
        f"order {summary.order}: max abs err {summary.max_abs_err:.3e}, "
        f"max rel err {summary.max_rel_err:.3e}, "
        f"max pole Re {summary.max_pole_re:.4e}, stable={summary.stable}"
    )


if __name__ == "__main__":
    raise SystemExit(main())
