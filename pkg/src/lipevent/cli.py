"""Command-line entry point: ``lipevent {detect,evaluate,synth,states,detnum}``.

Exit codes: 0 success, 1 input error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .analysis import detnum_curve, write_detnum_csv
from .detector import DEFAULT_LADDER, DetectionConfig, detect_events, framewise_states, parse_ladder, preprocess
from .divergence import interframe_series
from .errors import InvalidConfig, LipEventError
from .metrics import evaluate, recall_curve
from .synth import SUITE_SPEED_RANGE, SynthConfig, benchmark_suite, config_dict, generate

log = logging.getLogger("lipevent")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_config(args) -> DetectionConfig:
    """Config file values, overridden by any flags given on the command line."""
    try:
        cfg = DetectionConfig.load(args.config) if args.config else DetectionConfig()
        changes = {}
        if args.ladder is not None:
            changes["resolution_ladder"] = parse_ladder(args.ladder)
        if args.smooth is not None:
            changes["smoothing_window"] = args.smooth
        if args.eps_silence is not None:
            changes["eps_silence"] = args.eps_silence
        if args.eps_symmetry is not None:
            changes["eps_symmetry"] = args.eps_symmetry
        if args.fps is not None:
            changes["frame_rate"] = args.fps
        if args.no_fallback:
            changes["coarse_fallback"] = False
        return cfg.replace(**changes) if changes else cfg
    except (InvalidConfig, OSError) as exc:
        raise ConfigError(str(exc)) from None


def write_manifest(out: Path, command: str, args, extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "inputs": [str(p) for p in getattr(args, "inputs", []) or []],
        "config": args.config,
        "output": str(out),
        "version": __version__,
        "numpy": np.__version__,
        "seed": args.seed,
    }
    manifest.update(extra or {})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _detect_one(job):
    path, cfg, open_window, close_window = job
    try:
        seq = io.read_sequence(path, cfg.frame_rate)
        result = detect_events(seq, cfg, open_window, close_window)
    except (LipEventError, OSError) as exc:
        return path, None, f"{path}: {exc}"
    data = {"sequence": io.sequence_id(path), "frame_rate": seq.frame_rate}
    data.update(result.to_dict())
    return path, data, None


def cmd_detect(args) -> int:
    cfg = build_config(args)
    out = Path(args.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    paths = io.list_sequences(args.inputs)
    if not paths:
        log.error("no input sequences found")
        return EXIT_INPUT
    jobs = [(p, cfg, args.open_window, args.close_window) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_detect_one, jobs))
    else:
        outcomes = [_detect_one(job) for job in jobs]
    rows, failed = [], 0
    for path, data, error in outcomes:
        if error:
            print(error, file=sys.stderr)
            failed += 1
            continue
        io.write_result(data, out / f"{data['sequence']}{io.RESULT_SUFFIX}")
        rows.append([data["sequence"], _cell(data["opening_frame"]), _cell(data["closing_frame"]),
                     _cell(data["opening_resolution"]), _cell(data["closing_resolution"])])
        log.info("%s: opening=%s closing=%s", data["sequence"], data["opening_frame"], data["closing_frame"])
    io.write_rows(out / "summary.csv", ["sequence", "opening", "closing", "open_res", "close_res"], rows)
    write_manifest(out, "detect", args, {"detection_config": cfg.to_dict()})
    return EXIT_INPUT if failed else EXIT_OK


def _cell(value):
    return "" if value is None else value


def _collect(paths, suffix) -> dict[str, Path]:
    found = {}
    for p in map(Path, paths):
        for q in (sorted(p.glob(f"*{suffix}")) if p.is_dir() else [p]):
            found[io.sequence_id(q)] = q
    return found


def cmd_evaluate(args) -> int:
    cfg = build_config(args)
    tolerance = args.tolerance if args.tolerance is not None else 40.0
    results = {k: io.read_result(p) for k, p in _collect([args.results], io.RESULT_SUFFIX).items()}
    truths = {k: io.read_truth(p) for k, p in _collect([args.truths], io.TRUTH_SUFFIX).items()}
    report = evaluate(results, truths, tolerance, cfg.frame_rate)
    out = Path(args.out or "evaluation")
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=1) + "\n", encoding="utf-8")
    tolerances = list(range(0, 101, 5))
    io.write_rows(out / "recall_curve.csv", ["tolerance", "e_rr"], recall_curve(report.deviations, tolerances))
    write_manifest(out, "evaluate", args, {"results": args.results, "truths": args.truths, "tolerance": tolerance})
    print(f"F-Acc {report.f_acc}  F-Dev {report.f_dev_opening}/{report.f_dev_closing}  "
          f"E-RR {report.e_rr}  T-Dev {report.t_dev_ms} ms")
    return EXIT_OK


def cmd_synth(args) -> int:
    out = Path(args.out or "synth")
    out.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else 0
    noise = args.noise or [0.0]
    try:
        if args.count > 1:
            items = benchmark_suite(args.count, args.speed_range or SUITE_SPEED_RANGE, noise, seed)
        else:
            cfg = SynthConfig(
                frame_count=args.frames, landmark_count=args.landmarks, amplitude=args.amplitude,
                open_start=args.open_start, open_duration=args.open_duration,
                close_end=args.close_end, close_duration=args.close_duration,
                noise_sigma=noise[0], asymmetry=args.asymmetry, rigid_drift=args.drift,
                wiggle=args.wiggle, frame_rate=args.fps or 250.0, seed=seed,
            )
            items = [generate(cfg)]
    except InvalidConfig as exc:
        raise ConfigError(str(exc)) from None
    width = max(3, len(str(len(items) - 1)))
    configs = {}
    for i, item in enumerate(items):
        name = f"seq_{i:0{width}d}"
        if args.format == "json":
            io.write_json(item.sequence, out / f"{name}.json")
        else:
            io.write_csv(item.sequence, out / f"{name}.csv")
        io.write_truth(item.truth, out / f"{name}{io.TRUTH_SUFFIX}")
        configs[name] = config_dict(item.config)
    write_manifest(out, "synth", args, {"count": len(items), "sequences": configs})
    print(f"wrote {len(items)} sequences to {out}")
    return EXIT_OK


def cmd_states(args) -> int:
    cfg = build_config(args)
    try:
        seq = preprocess(io.read_sequence(args.input, cfg.frame_rate), cfg)
        total, left, right = interframe_series(seq.points, seq.points[0].mean(axis=0))
        states = framewise_states(seq, cfg)
    except (LipEventError, OSError) as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rows = [[0, 0.0, 0.0, 0.0, str(states[0])]]
    rows += [[t + 1, repr(float(a)), repr(float(b)), repr(float(c)), str(states[t + 1])]
             for t, (a, b, c) in enumerate(zip(total, left, right))]
    header = ["frame", "div_total", "div_left", "div_right", "state"]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_rows(out / f"{io.sequence_id(args.input)}.states.csv", header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(map(str, row)))
    return EXIT_OK


def cmd_detnum(args) -> int:
    try:
        ladders = [parse_ladder(s) for s in args.ladders.split(",")]
        for ladder in ladders:
            DetectionConfig(resolution_ladder=ladder)
    except InvalidConfig as exc:
        raise ConfigError(str(exc)) from None
    lo, hi = args.gt_range
    rows = detnum_curve(range(lo, hi + 1), ladders)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_detnum_csv(rows, out / "detnum.csv")
    else:
        print("gt0,ladder,detnum")
        for gt0, ladder, count in rows:
            print(f"{gt0},{'-'.join(map(str, ladder))},{count}")
    return EXIT_OK


def _default_ladders() -> str:
    return ",".join("-".join(map(str, DEFAULT_LADDER[i:])) for i in range(len(DEFAULT_LADDER)))


def make_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key = value file with DetectionConfig fields")
    shared.add_argument("--out", help="output directory")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--ladder", help="resolution ladder, e.g. 30-15-7-3-1")
    shared.add_argument("--smooth", type=int, help="smoothing window (odd; 1 disables)")
    shared.add_argument("--eps-silence", type=float)
    shared.add_argument("--eps-symmetry", type=float)
    shared.add_argument("--fps", type=float, help="frame rate for CSV inputs")
    shared.add_argument("--tolerance", type=float, help="E-RR deviation tolerance in frames (default 40)")
    shared.add_argument("--no-fallback", action="store_true", help="disable the coarse-resolution fallback")
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lipevent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", parents=[shared], help="detect opening/closing frames")
    p.add_argument("inputs", nargs="+", help="landmark files (.csv/.json) or directories")
    p.add_argument("--open-window", type=_range, help="opening search frames LO:HI (default first half)")
    p.add_argument("--close-window", type=_range, help="closing search frames LO:HI (default second half)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", parents=[shared], help="score results against truth sidecars")
    p.add_argument("results", help="directory or file of *.result.json")
    p.add_argument("truths", help="directory or file of *.truth.json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", parents=[shared], help="write synthetic sequences with ground truth")
    p.add_argument("--count", type=int, default=1, help="more than 1 generates a benchmark suite")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--noise", type=_floats, help="noise sigma(s) in mm, comma-separated")
    p.add_argument("--speed-range", type=_range, help="ramp durations LO:HI in frames (suites)")
    p.add_argument("--frames", type=int, default=500)
    p.add_argument("--landmarks", type=int, default=20)
    p.add_argument("--amplitude", type=float, default=5.0)
    p.add_argument("--open-start", type=int, default=100)
    p.add_argument("--open-duration", type=int, default=5)
    p.add_argument("--close-end", type=int, default=400)
    p.add_argument("--close-duration", type=int, default=5)
    p.add_argument("--asymmetry", type=float, default=1.0)
    p.add_argument("--drift", type=float, default=0.0)
    p.add_argument("--wiggle", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("states", parents=[shared], help="per-frame divergence trace of one sequence")
    p.add_argument("input")
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("detnum", parents=[shared], help="closed-form detection-count curves")
    p.add_argument("--ladders", default=_default_ladders(), help="comma-separated ladders")
    p.add_argument("--gt-range", type=_range, default=(1, 300))
    p.set_defaults(func=cmd_detnum)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LipEventError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
