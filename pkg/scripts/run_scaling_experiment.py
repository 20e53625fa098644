#!/usr/bin/env python3
"""Scaling of the ensemble-mean catness with system size.

Runs the Monte Carlo ensemble for a list of N at fixed protocol
parameters, emits the per-(N, checkpoint) means next to the two
zero-temperature reference curves, and fits the log-log slope at every
checkpoint.

Example:
    python scripts/run_scaling_experiment.py --n-list 3,5,7,15,31,63 --runs 300
    python scripts/run_scaling_experiment.py --quick
"""

import argparse
import json
import sys
from pathlib import Path

from spincat import TrajectoryConfig, fit_scaling, reference_closed_form, reference_ideal, run_ensemble


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n-list", default="3,5,7,15,31,63")
    ap.add_argument("--beta", type=float, default=10.0)
    ap.add_argument("--h", type=float, default=0.5)
    ap.add_argument("--gt", type=float, default=0.222)
    ap.add_argument("--m", type=int, default=1000)
    ap.add_argument("--runs", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--checkpoints", default="10,50,100,600,1000")
    ap.add_argument("--out", default="data/scaling")
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    if args.quick:
        args.n_list, args.runs, args.m, args.checkpoints = "3,5,7", 30, 100, "10,50,100"

    ns = [int(t) for t in args.n_list.replace(",", " ").split()]
    checkpoints = tuple(int(t) for t in args.checkpoints.replace(",", " ").split())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    means: dict[int, dict[int, tuple[float, float]]] = {}
    for n in ns:
        config = TrajectoryConfig(n=n, beta=args.beta, omega_p=args.h, gt=args.gt,
                                  m=args.m, checkpoints=checkpoints, master_seed=args.seed)
        average, _ = run_ensemble(config, args.runs)
        means[n] = {
            cp: (m, e) for cp, m, e in zip(average.checkpoints, average.mean, average.stderr)
        }
        print(f"N={n}: mean catness at m={args.m}: {means[n][checkpoints[-1]][0]:.4f}")

    with (out / "scaling.csv").open("w") as fh:
        fh.write("n,checkpoint,mean,stderr,ideal,ideal_half,closed_form\n")
        for n in ns:
            ideal = reference_ideal(n, n_max=max(ns))
            closed = reference_closed_form(n)
            for cp in checkpoints:
                mean, err = means[n][cp]
                fh.write(f"{n},{cp},{mean:.17g},{err:.17g},{ideal:.17g},{ideal/2.0:.17g},{closed:.17g}\n")

    fits = {}
    for cp in checkpoints:
        fit = fit_scaling([(n, means[n][cp][0], means[n][cp][1]) for n in ns])
        fits[str(cp)] = {"q": fit.q, "intercept": fit.intercept, "r_squared": fit.r_squared}
        print(f"m={cp}: q = {fit.q:.4f}")
    for name, column in (("ideal", 0), ("closed_form", 1)):
        values = [(n, (reference_ideal(n, n_max=max(ns)), reference_closed_form(n))[column]) for n in ns]
        fits[f"reference_{name}"] = {"q": fit_scaling(values).q}
    (out / "fits.json").write_text(json.dumps(fits, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'scaling.csv'} and {out / 'fits.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
