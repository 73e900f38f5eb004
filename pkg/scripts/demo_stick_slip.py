"""Drag a pointer across surfaces of increasing static friction and
summarize the stick-slip behavior of each run.

Writes one trajectory CSV per friction level when --out-dir is given.
"""

import argparse
import sys
from pathlib import Path

from stickslip.friction import FrictionParams, Phase
from stickslip.traces import save_trajectory, simulate_trace, synth_constant_velocity


def summarize(rows) -> dict:
    transitions = 0
    max_string = 0.0
    stick_ticks = 0
    for a, b in zip(rows, rows[1:]):
        if a.phase is Phase.STICK and b.phase is Phase.SLIP:
            transitions += 1
        max_string = max(max_string, b.string_len)
        stick_ticks += b.phase is Phase.STICK
    return {
        "breakaways": transitions,
        "stick_fraction": stick_ticks / max(len(rows) - 1, 1),
        "max_string_px": max_string,
        "final_lag_px": rows[-1].q - rows[-1].p,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--velocity", type=float, default=50.0, help="drag speed, px/s")
    ap.add_argument("--duration", type=float, default=5.0, help="seconds")
    ap.add_argument("--levels", type=float, nargs="+",
                    default=[0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    ap.add_argument("--out-dir", type=Path, default=None)
    args = ap.parse_args(argv)

    samples = synth_constant_velocity(args.velocity, args.duration)
    print(f"{'mu_s':>5} {'breakaways':>10} {'stick%':>7} "
          f"{'max string':>10} {'final lag':>9}")
    for mu_s in args.levels:
        params = FrictionParams(mu_s=mu_s)
        trajectory = simulate_trace(samples, params)
        s = summarize(trajectory.rows)
        print(f"{mu_s:5.2f} {s['breakaways']:10d} {s['stick_fraction']:7.1%} "
              f"{s['max_string_px']:10.1f} {s['final_lag_px']:9.2f}")
        if args.out_dir is not None:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            out = args.out_dir / f"drag_mu{mu_s:.2f}.csv"
            save_trajectory(trajectory, out)
            print(f"      wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
