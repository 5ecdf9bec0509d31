"""Command-line surface: one subcommand per experiment family.

Examples:
    weightedl1 theory --variant fig1a --out fig1a.csv
    weightedl1 synth --variant fig2a --trials 100 --out fig2a.csv
    weightedl1 prior --kind tree --trials 50 --out tree.csv
    weightedl1 video --synthetic 20 --out video.csv
    weightedl1 tiny-theorem --trials 200 --out tiny.csv
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (DEFAULT_M_GRID, ExperimentSpec, run_fig1, run_prior,
                          run_synth, run_tiny_theorem)
from .video import VideoConfig, run_video


def _apply_config_file(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            overrides = json.load(fh)
        for key, value in overrides.items():
            setattr(args, key, value)
    return args


def _spec_from_args(args, experiment):
    return ExperimentSpec(
        experiment=experiment,
        n=args.n,
        s=getattr(args, "s", 16),
        sigma=args.sigma,
        trials=args.trials,
        m_grid=tuple(args.m_grid),
        seed=args.seed,
        options=getattr(args, "options", {}) or {},
    )


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--out", required=True)
    parser.add_argument("--config", help="JSON file overriding any flag")
    parser.add_argument("--n", type=int, default=256)
    parser.add_argument("--sigma", type=float, default=0.01)
    parser.add_argument("--m-grid", type=int, nargs="+", dest="m_grid",
                        default=list(DEFAULT_M_GRID))


def build_parser():
    parser = argparse.ArgumentParser(prog="weightedl1")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="sufficient-condition threshold sweeps")
    p.add_argument("--variant", choices=("fig1a", "fig1b"), default="fig1a")
    p.add_argument("--a", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file overriding any flag")

    p = sub.add_parser("synth", help="synthetic two-support-estimate sweeps")
    p.add_argument("--variant", choices=("fig2a", "fig2b"), default="fig2a")
    p.add_argument("--s", type=int, default=16)
    _add_common(p)

    p = sub.add_parser("prior", help="power-law / binary-tree prior experiments")
    p.add_argument("--kind", choices=("power", "tree"), default="power")
    _add_common(p)

    p = sub.add_parser("video", help="compressed video-frame recovery")
    p.add_argument("--input", default="", help="raw YUV 4:2:0 file or PGM directory")
    p.add_argument("--synthetic", type=int, default=0,
                   help="generate a synthetic test sequence of this many frames")
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--m", type=int, default=3168)
    p.add_argument("--top-fraction", type=float, default=0.10, dest="top_fraction")
    p.add_argument("--single-weight", type=float, default=0.5, dest="single_weight")
    p.add_argument("--methods", nargs="+", default=["l1", "single", "adaptive", "oracle"])
    p.add_argument("--max-iter", type=int, default=2000, dest="max_iter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file overriding any flag")

    p = sub.add_parser("tiny-theorem", help="end-to-end bound check on tiny instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file overriding any flag")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    args = _apply_config_file(args)

    if args.command == "theory":
        run_fig1(args.variant, args.out, a=args.a, seed=args.seed)
        print(f"wrote {args.out}")
    elif args.command == "synth":
        spec = _spec_from_args(args, args.variant)
        run_synth(spec, out=args.out)
        print(f"wrote {args.out}")
    elif args.command == "prior":
        spec = _spec_from_args(args, args.kind)
        run_prior(spec, out=args.out)
        print(f"wrote {args.out}")
    elif args.command == "video":
        config = VideoConfig(input_path=args.input, frame_count=args.frames,
                             m=args.m, top_fraction=args.top_fraction,
                             single_weight=args.single_weight,
                             methods=tuple(args.methods), seed=args.seed,
                             max_iter=args.max_iter,
                             synthetic_frames=args.synthetic)
        run_video(config, out=args.out)
        print(f"wrote {args.out}")
    elif args.command == "tiny-theorem":
        spec = ExperimentSpec(experiment="tiny-theorem", trials=args.trials,
                              sigma=args.sigma, seed=args.seed)
        result = run_tiny_theorem(spec, out=args.out)
        print(f"status={result['status']} qualifying={result['qualifying']} "
              f"violations={result['violations']} skipped={result['skipped']}")
        if result["status"] == "fail":
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
