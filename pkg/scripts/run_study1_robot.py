"""Scripted 2AFC discrimination study with a simulated observer.

Runs the 60-trial discrimination session for a panel of robot
participants under both visualization conditions, writes the pooled
results files, and fits a psychometric curve per condition.
"""

import argparse
import math
import sys
from pathlib import Path

from stickslip.analysis import fit_psychometric, jnd, pse
from stickslip.experiment import (
    append_results,
    discrimination_config,
    tally_jnd_proportions,
)
from stickslip.friction import FrictionParams
from stickslip.robot import IdealLogisticResponder, run_robot_session


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--participants", type=int, default=10)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--slope", type=float, default=4.0,
                    help="observer sensitivity (logistic slope)")
    ap.add_argument("--midpoint", type=float, default=0.5,
                    help="observer point of subjective equality")
    ap.add_argument("--out-dir", type=Path, default=Path("study1_out"))
    args = ap.parse_args(argv)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    # base surface; each stimulus presentation overrides mu_s
    params = FrictionParams(mu_s=0.7)
    responder = IdealLogisticResponder(slope=args.slope, midpoint=args.midpoint)

    for with_string in (True, False):
        label = "string" if with_string else "nostring"
        out = args.out_dir / f"results_{label}.jsonl"
        out.unlink(missing_ok=True)
        pooled = []
        for pid in range(args.participants):
            config = discrimination_config(with_string=with_string,
                                           seed=args.seed,
                                           participant_index=pid)
            records = run_robot_session(config, params, responder)
            append_results(out, config, records)
            pooled.extend(records)

        fit = fit_psychometric(sorted(tally_jnd_proportions(pooled).items()))
        print(f"condition={label}: {len(pooled)} trials -> {out}")
        if fit.identifiable:
            print(f"  slope={fit.slope:.4f}  pse={pse(fit):.4f}  "
                  f"jnd={jnd(fit):.4f}  (ln3/slope check: "
                  f"{jnd(fit) * fit.slope / math.log(3.0):.6f})")
        else:
            print("  psychometric fit not identifiable")
    return 0


if __name__ == "__main__":
    sys.exit(main())
