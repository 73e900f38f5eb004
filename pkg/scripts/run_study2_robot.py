"""Scripted magnitude-estimation study with a simulated observer.

Runs the 35-trial magnitude session for a panel of power-law robot
participants, fits the pooled intensity-rating relation, and tests the
per-level means with a repeated-measures ANOVA plus Tukey HSD.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from stickslip.analysis import fit_power_law, rm_anova, tukey_hsd
from stickslip.experiment import append_results, magnitude_config
from stickslip.friction import FrictionParams
from stickslip.robot import PowerLawResponder, run_robot_session


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--participants", type=int, default=10)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--scale", type=float, default=1.12)
    ap.add_argument("--exponent", type=float, default=0.204)
    ap.add_argument("--noise", type=float, default=0.05,
                    help="sd of log-ratio rating noise")
    ap.add_argument("--out", type=Path, default=Path("study2_out/results.jsonl"))
    args = ap.parse_args(argv)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.unlink(missing_ok=True)
    # base surface; each stimulus presentation overrides mu_s
    params = FrictionParams(mu_s=0.7)
    responder = PowerLawResponder(scale=args.scale, exponent=args.exponent,
                                  noise=args.noise)

    by_participant: list[dict[float, list[float]]] = []
    pooled: list[tuple[float, float]] = []
    for pid in range(args.participants):
        config = magnitude_config(seed=args.seed, participant_index=pid)
        records = run_robot_session(config, params, responder)
        append_results(args.out, config, records)
        ratings: dict[float, list[float]] = {}
        for r in records:
            ratings.setdefault(r.comparison_mu_s, []).append(float(r.response))
            pooled.append((r.comparison_mu_s, float(r.response)))
        by_participant.append(ratings)

    fit = fit_power_law(pooled)
    print(f"{len(pooled)} ratings -> {args.out}")
    print(f"power law: scale={fit.scale:.4f}  exponent={fit.exponent:.4f}  "
          f"r^2={fit.r_squared:.4f}")

    levels = sorted(by_participant[0])
    matrix = np.array([[float(np.mean(rt[lv])) for lv in levels]
                       for rt in by_participant])
    anova = rm_anova(matrix)
    print(f"rm-anova: F({anova.df1},{anova.df2}) = {anova.f_value:.3f}, "
          f"p = {anova.p_value:.4g}")
    for pair in tukey_hsd(matrix, anova):
        stars = "**" if pair.significant_01 else ("*" if pair.significant_05 else "")
        print(f"  mu_s {levels[pair.first]:.1f} vs {levels[pair.second]:.1f}: "
              f"q = {pair.q_value:.3f} {stars}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
