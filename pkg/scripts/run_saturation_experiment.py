#!/usr/bin/env python3
"""Single-trajectory catness trace plus ensemble average for one system size.

Produces the data behind the "catness vs number of measurements" picture:
one full per-step trajectory trace and the ensemble mean at a grid of
checkpoints, then reports the relative change of the mean between two
late checkpoints (saturation check).

Example:
    python scripts/run_saturation_experiment.py --n 15 --runs 3000 --out data/saturation
    python scripts/run_saturation_experiment.py --quick
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from spincat import TrajectoryConfig, build_block_basis, build_kraus, run_ensemble, run_trajectory
from spincat.trajectory import replay_trajectory, trajectory_stream


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=15)
    ap.add_argument("--beta", type=float, default=10.0)
    ap.add_argument("--h", type=float, default=0.5)
    ap.add_argument("--gt", type=float, default=0.222)
    ap.add_argument("--m", type=int, default=1000)
    ap.add_argument("--runs", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--stride", type=int, default=20, help="checkpoint spacing for the mean curve")
    ap.add_argument("--out", default="data/saturation")
    ap.add_argument("--quick", action="store_true", help="small run for a smoke test")
    args = ap.parse_args()
    if args.quick:
        args.runs, args.m, args.stride = 50, 200, 10

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    # full-resolution single trajectory (replayed with every step as a checkpoint)
    coarse = TrajectoryConfig(n=args.n, beta=args.beta, omega_p=args.h, gt=args.gt,
                              m=args.m, checkpoints=(), master_seed=args.seed)
    basis = build_block_basis(args.n)
    kraus = build_kraus(basis, args.gt)
    rec = run_trajectory(coarse, basis, kraus, trajectory_stream(args.seed, 0))
    dense_cfg = TrajectoryConfig(n=args.n, beta=args.beta, omega_p=args.h, gt=args.gt,
                                 m=args.m, checkpoints=tuple(range(args.m + 1)),
                                 master_seed=args.seed)
    trace = replay_trajectory(dense_cfg, basis, kraus, rec.outcomes)
    with (out / "single_trajectory.csv").open("w") as fh:
        fh.write("m,catness\n")
        for step in range(args.m + 1):
            fh.write(f"{step},{trace.catness_at[step]:.17g}\n")

    checkpoints = tuple(range(0, args.m + 1, args.stride))
    config = TrajectoryConfig(n=args.n, beta=args.beta, omega_p=args.h, gt=args.gt,
                              m=args.m, checkpoints=checkpoints, master_seed=args.seed)
    average, _ = run_ensemble(config, args.runs)
    with (out / "ensemble_mean.csv").open("w") as fh:
        fh.write("m,mean,stderr,runs\n")
        for cp, mean, err in zip(average.checkpoints, average.mean, average.stderr):
            fh.write(f"{cp},{mean:.17g},{err:.17g},{average.runs}\n")

    grid = np.array(average.checkpoints)
    late = average.mean[np.searchsorted(grid, int(0.6 * args.m))]
    final = average.mean[-1]
    change = abs(final - late) / late if late else float("nan")
    print(f"mean catness at m={int(0.6 * args.m)}: {late:.4f}, at m={args.m}: {final:.4f} "
          f"(relative change {100 * change:.2f}%)")
    print(f"wrote {out / 'single_trajectory.csv'} and {out / 'ensemble_mean.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
