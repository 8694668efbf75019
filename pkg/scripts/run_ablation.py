"""Ablation over ladder, smoothing and fallback on a synthetic benchmark suite.

    python scripts/run_ablation.py --count 100 --noise 0.3 --speed-range 3:40
"""

import argparse

from lipevent.detector import DetectionConfig, detect_events
from lipevent.metrics import evaluate
from lipevent.synth import SUITE_SPEED_RANGE, benchmark_suite

ROWS = {
    "multi, smoothed": DetectionConfig(),
    "multi, raw": DetectionConfig(smoothing_window=1),
    "multi, no fallback": DetectionConfig(coarse_fallback=False),
    "single [1], smoothed": DetectionConfig(resolution_ladder=(1,)),
    "single [1], raw": DetectionConfig(resolution_ladder=(1,), smoothing_window=1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--noise", type=float, default=0.3)
    ap.add_argument("--speed-range", default=f"{SUITE_SPEED_RANGE[0]}:{SUITE_SPEED_RANGE[1]}")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tolerance", type=float, default=40)
    args = ap.parse_args()
    lo, hi = map(int, args.speed_range.split(":"))
    suite = benchmark_suite(args.count, (lo, hi), (args.noise,), args.seed)
    truths = {str(i): s.truth for i, s in enumerate(suite)}
    print(f"{'configuration':<22}{'F-Acc':>8}{'F-Dev o':>9}{'F-Dev c':>9}{'E-RR':>7}{'T-Dev ms':>10}")
    for name, cfg in ROWS.items():
        results = {str(i): detect_events(s.sequence, cfg).to_dict() for i, s in enumerate(suite)}
        r = evaluate(results, truths, args.tolerance, cfg.frame_rate)
        cells = [r.f_acc, r.f_dev_opening, r.f_dev_closing, r.e_rr, r.t_dev_ms]
        print(f"{name:<22}" + "".join(f"{'n/a' if v is None else f'{v:.3f}':>{w}}"
                                      for v, w in zip(cells, (8, 9, 9, 7, 10))))


if __name__ == "__main__":
    main()
