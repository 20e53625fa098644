"""Command-line interface: deterministic data artifacts for every experiment.

Subcommands
-----------
simulate     Monte Carlo ensemble: per-step outcomes, per-checkpoint catness,
             ensemble averages.
pk           Analytic distribution of the plus-outcome count k.
predict      Convergence target |Sx = L> for a given (N, m, k, gt).
references   Zero-temperature reference curves (trace-norm and closed form).
fit          Log-log scaling fit of a two-column CSV.
oracle-check Blockwise engine vs dense brute force equivalence report.
sensitivity  Ramsey frequency uncertainty for a chosen probe state.

Every command writes its outputs into --out together with a manifest.json
sidecar (configuration echo, seed, version, timestamp).  Data files are
byte-identical across reruns with the same parameters and seed; the
manifest carries the only timestamp.  CSV files start with a
"# manifest: ..." comment line; JSONL files start with a
{"manifest": ...} record.  All numbers are printed with 17 significant
digits.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    fit_scaling,
    pk_distribution,
    predict_convergence,
    ramsey_uncertainty,
    reference_closed_form,
    reference_ideal,
    derivative_small_omega,
)
from .blocks import build_block_basis, dicke_state, pure_symmetric_state, thermal_state
from .errors import ConfigurationError
from .measurement import apply_outcome, build_kraus, outcome_probabilities
from .metric import catness, commutator_projector, projection_postselect, q_prime
from .oracle import DenseOracle, max_abs_difference
from .trajectory import TrajectoryConfig, run_ensemble

MANIFEST_NAME = "manifest.json"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_manifest(out_dir: Path, command: str, params: dict, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _csv_open(path: Path, header: str):
    fh = path.open("w")
    fh.write(f"# manifest: {MANIFEST_NAME}\n")
    fh.write(header + "\n")
    return fh


def _jsonl_open(path: Path):
    fh = path.open("w")
    fh.write(json.dumps({"manifest": MANIFEST_NAME}) + "\n")
    return fh


def _parse_checkpoints(text: str | None) -> tuple[int, ...] | None:
    if text is None or text.strip() == "":
        return None
    return tuple(int(t) for t in text.replace(",", " ").split())


def _parse_n_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


# ----------------------------------------------------------------- commands

def _cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = TrajectoryConfig(
        n=args.n,
        beta=args.beta,
        omega_p=args.h,
        gt=args.gt,
        m=args.m,
        checkpoints=_parse_checkpoints(args.checkpoints),
        master_seed=args.seed,
        initial=args.initial.replace("-", "_"),
    )
    average, records = run_ensemble(config, args.runs, workers=args.workers)

    ext = args.format
    outcome_path = out_dir / f"outcomes.{ext}"
    catness_path = out_dir / f"catness.{ext}"
    ensemble_path = out_dir / "ensemble.csv"

    if ext == "csv":
        with _csv_open(outcome_path, "trajectory_index,step,outcome") as fh:
            for rec in records:
                for step, outcome in enumerate(rec.outcomes, start=1):
                    fh.write(f"{rec.trajectory_index},{step},{int(outcome)}\n")
        with _csv_open(catness_path, "trajectory_index,checkpoint,catness") as fh:
            for rec in records:
                for cp in sorted(rec.catness_at):
                    fh.write(f"{rec.trajectory_index},{cp},{_fmt(rec.catness_at[cp])}\n")
    else:
        with _jsonl_open(outcome_path) as fh:
            for rec in records:
                for step, outcome in enumerate(rec.outcomes, start=1):
                    fh.write(
                        f'{{"trajectory_index": {rec.trajectory_index}, "step": {step}, "outcome": {int(outcome)}}}\n'
                    )
        with _jsonl_open(catness_path) as fh:
            for rec in records:
                for cp in sorted(rec.catness_at):
                    fh.write(
                        f'{{"trajectory_index": {rec.trajectory_index}, "checkpoint": {cp}, '
                        f'"catness": {_fmt(rec.catness_at[cp])}}}\n'
                    )
    with _csv_open(ensemble_path, "checkpoint,mean,stderr,runs") as fh:
        for cp, mean, stderr in zip(average.checkpoints, average.mean, average.stderr):
            fh.write(f"{cp},{_fmt(mean)},{_fmt(stderr)},{average.runs}\n")

    _write_manifest(
        out_dir,
        "simulate",
        {
            "n": config.n,
            "beta": config.beta,
            "h": config.omega_p,
            "gt": config.gt,
            "m": config.m,
            "runs": args.runs,
            "seed": config.master_seed,
            "checkpoints": list(config.resolved_checkpoints()),
            "initial": config.initial,
            "format": ext,
            "workers": args.workers,
        },
        [outcome_path.name, catness_path.name, ensemble_path.name],
    )
    print(f"simulate: {args.runs} trajectories -> {out_dir}")
    return 0


def _cmd_pk(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dist = pk_distribution(args.n, args.m, args.gt)
    path = out_dir / "pk.csv"
    with _csv_open(path, "k,p") as fh:
        for k, p in enumerate(dist.probabilities):
            fh.write(f"{k},{_fmt(p)}\n")
    _write_manifest(out_dir, "pk", {"n": args.n, "m": args.m, "gt": args.gt}, [path.name])
    print(f"pk: argmax k = {int(np.argmax(dist.probabilities))} -> {path}")
    return 0


def _cmd_predict(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pred = predict_convergence(args.n, args.m, args.k, args.gt)
    record = {
        "n": pred.N,
        "wide_coupling": pred.wide_coupling,
        "theta_candidates": [float(t) for t in pred.theta_candidates],
        "L": pred.L,
        "L_candidates": list(pred.L_candidates),
        "degenerate": pred.degenerate,
    }
    path = out_dir / "predict.json"
    path.write_text(json.dumps(record, indent=2) + "\n")
    _write_manifest(
        out_dir, "predict", {"n": args.n, "m": args.m, "k": args.k, "gt": args.gt}, [path.name]
    )
    print(json.dumps(record))
    return 0


def _cmd_references(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = _parse_n_list(args.n_list)
    limit = max(ns)
    path = out_dir / "references.csv"
    with _csv_open(path, "n,ideal,ideal_half,closed_form") as fh:
        for n in ns:
            ideal = reference_ideal(n, n_max=limit)
            fh.write(f"{n},{_fmt(ideal)},{_fmt(ideal / 2.0)},{_fmt(reference_closed_form(n))}\n")
    _write_manifest(out_dir, "references", {"n_list": ns}, [path.name])
    print(f"references: {len(ns)} rows -> {path}")
    return 0


def _read_csv_columns(path: Path, x_column: str, y_column: str) -> list[tuple[float, float]]:
    rows = []
    header: list[str] | None = None
    for line in path.read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        cells = line.split(",")
        if header is None:
            header = [c.strip() for c in cells]
            continue
        record = dict(zip(header, cells))
        rows.append((float(record[x_column]), float(record[y_column])))
    if header is None:
        raise ConfigurationError(f"{path} has no header row")
    return rows


def _cmd_fit(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = _read_csv_columns(Path(args.input), args.x_column, args.y_column)
    fit = fit_scaling(points)
    record = {
        "input": str(args.input),
        "x_column": args.x_column,
        "y_column": args.y_column,
        "n_points": len(points),
        "q": float(_fmt(fit.q)),
        "intercept": float(_fmt(fit.intercept)),
        "r_squared": float(_fmt(fit.r_squared)),
    }
    path = out_dir / "fit.json"
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    _write_manifest(
        out_dir,
        "fit",
        {"input": str(args.input), "x_column": args.x_column, "y_column": args.y_column},
        [path.name],
    )
    print(f"fit: q = {_fmt(fit.q)} (r^2 = {_fmt(fit.r_squared)}) -> {path}")
    return 0


def _cmd_oracle_check(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    n, seed = args.n, args.seed
    oracle = DenseOracle(n)
    basis = build_block_basis(n)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    gt = 0.3
    kraus = build_kraus(basis, gt)
    checks: list[tuple[str, float, float]] = []

    state = thermal_state(basis, 1.0, 0.5)
    rho = oracle.thermal(1.0, 0.5)
    checks.append(("thermal state embed", max_abs_difference(oracle.block_to_dense(state), rho), 1e-10))

    worst_p = worst_state = worst_cat = 0.0
    for _ in range(args.trajectories):
        state = thermal_state(basis, 1.0, 0.5)
        rho = oracle.thermal(1.0, 0.5)
        for _step in range(args.steps):
            outcome = 1 if rng.random() < 0.5 else -1
            p_block = outcome_probabilities(state, kraus)[0 if outcome == 1 else 1]
            p_dense = oracle.outcome_probability(rho, gt, outcome)
            worst_p = max(worst_p, abs(p_block - p_dense))
            state = apply_outcome(state, kraus, outcome)
            rho, _ = oracle.kraus_step(rho, gt, outcome)
        worst_state = max(worst_state, max_abs_difference(oracle.block_to_dense(state), rho))
        worst_cat = max(worst_cat, abs(catness(state).value - oracle.catness(rho)))
    checks.append(("trajectory probabilities", worst_p, 1e-12))
    checks.append(("trajectory states", worst_state, 1e-10))
    checks.append(("trajectory catness", worst_cat, 1e-10))

    post, p_block = projection_postselect(thermal_state(basis, 1.0, 0.5), n % 2)
    post_dense, p_dense = oracle.projection(oracle.thermal(1.0, 0.5), n % 2)
    checks.append(("projection probability", abs(p_block - p_dense), 1e-12))
    checks.append(("projection state", max_abs_difference(oracle.block_to_dense(post), post_dense), 1e-10))

    all_ok = True
    lines = []
    for name, dev, tol in checks:
        ok = dev <= tol
        all_ok &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: max deviation {dev:.3e} (tol {tol:.0e})")
    report = "\n".join(lines)
    print(report)
    (out_dir / "oracle_check.txt").write_text(report + "\n")
    _write_manifest(
        out_dir,
        "oracle-check",
        {"n": n, "seed": seed, "trajectories": args.trajectories, "steps": args.steps},
        ["oracle_check.txt"],
    )
    return 0 if all_ok else 1


def _cmd_sensitivity(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    basis = build_block_basis(args.n)
    if args.source == "dicke":
        theta = args.theta if args.theta is not None else args.n % 2
        state = dicke_state(basis, theta)
        source = {"source": "dicke", "n": args.n, "theta": theta}
    else:
        amps = np.zeros(basis.top.dim, dtype=complex)
        amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
        state = pure_symmetric_state(basis, amps)
        source = {"source": "ghz", "n": args.n}
    projector = commutator_projector(state)
    probability = 0.0
    for sector, block, eta in zip(basis.sectors, state.blocks, projector.blocks):
        probability += float(sector.multiplicity) * float(np.trace(eta @ block).real)
    dp = derivative_small_omega(state, projector, args.t_int)
    estimate = ramsey_uncertainty(probability, dp, args.t_int, args.total_time)
    record = dict(
        source,
        probability=float(_fmt(estimate.probability)),
        dp_domega=float(_fmt(estimate.dp_domega)),
        t_int=estimate.t_int,
        total_time=estimate.total_time,
        delta_omega=float(_fmt(estimate.delta_omega)),
        q_prime=float(_fmt(q_prime(state, projector))),
    )
    path = out_dir / "sensitivity.json"
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    _write_manifest(out_dir, "sensitivity", source | {"t_int": args.t_int, "total_time": args.total_time}, [path.name])
    print(json.dumps(record))
    return 0


# -------------------------------------------------------------------- main

def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        elif ":" in line:
            key, _, val = line.partition(":")
        else:
            raise ConfigurationError(f"cannot parse config line: {raw!r}")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


_CONFIG_TYPES = {
    "n": int,
    "m": int,
    "k": int,
    "runs": int,
    "seed": int,
    "workers": int,
    "trajectories": int,
    "steps": int,
    "beta": float,
    "h": float,
    "gt": float,
    "t_int": float,
    "total_time": float,
    "theta": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincat",
        description="Collective-spin measurement-conversion simulator and analytics",
    )
    parser.add_argument("--version", action="version", version=f"spincat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo ensemble")
    sim.add_argument("--config", help="key=value file; flags override it")
    sim.add_argument("--n", type=int, default=15)
    sim.add_argument("--beta", type=float, default=10.0, help="inverse temperature (default 1/0.1)")
    sim.add_argument("--h", type=float, default=0.5, help="longitudinal field / Zeeman frequency")
    sim.add_argument("--gt", type=float, default=0.222)
    sim.add_argument("--m", type=int, default=1000, help="measurements per trajectory")
    sim.add_argument("--runs", type=int, default=3000)
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--checkpoints", default=None, help="comma list; default 10,50,100,600,1000 within [0,m]")
    sim.add_argument("--initial", choices=["gibbs", "all-up", "all_up"], default="gibbs")
    sim.add_argument("--out", default="spincat-out")
    sim.add_argument("--format", choices=["csv", "jsonl"], default="jsonl")
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=_cmd_simulate)

    pk = sub.add_parser("pk", help="analytic k distribution")
    pk.add_argument("--config", help="key=value file; flags override it")
    pk.add_argument("--n", type=int, required=True)
    pk.add_argument("--m", type=int, required=True)
    pk.add_argument("--gt", type=float, required=True)
    pk.add_argument("--out", default="spincat-out")
    pk.set_defaults(func=_cmd_pk)

    pred = sub.add_parser("predict", help="trajectory convergence target")
    pred.add_argument("--config", help="key=value file; flags override it")
    pred.add_argument("--n", type=int, required=True)
    pred.add_argument("--m", type=int, required=True)
    pred.add_argument("--k", type=int, required=True)
    pred.add_argument("--gt", type=float, required=True)
    pred.add_argument("--out", default="spincat-out")
    pred.set_defaults(func=_cmd_predict)

    refs = sub.add_parser("references", help="zero-temperature reference curves")
    refs.add_argument("--config", help="key=value file; flags override it")
    refs.add_argument("--n-list", default="3,5,7,15,31,63,127")
    refs.add_argument("--out", default="spincat-out")
    refs.set_defaults(func=_cmd_references)

    fit = sub.add_parser("fit", help="log-log scaling fit of a CSV")
    fit.add_argument("--config", help="key=value file; flags override it")
    fit.add_argument("--input", required=True)
    fit.add_argument("--x-column", default="n")
    fit.add_argument("--y-column", default="mean")
    fit.add_argument("--out", default="spincat-out")
    fit.set_defaults(func=_cmd_fit)

    orc = sub.add_parser("oracle-check", help="blockwise vs dense equivalence")
    orc.add_argument("--config", help="key=value file; flags override it")
    orc.add_argument("--n", type=int, default=4)
    orc.add_argument("--seed", type=int, default=1)
    orc.add_argument("--trajectories", type=int, default=10)
    orc.add_argument("--steps", type=int, default=20)
    orc.add_argument("--out", default="spincat-out")
    orc.set_defaults(func=_cmd_oracle_check)

    sens = sub.add_parser("sensitivity", help="Ramsey frequency uncertainty")
    sens.add_argument("--config", help="key=value file; flags override it")
    sens.add_argument("--source", choices=["ghz", "dicke"], default="ghz")
    sens.add_argument("--n", type=int, required=True)
    sens.add_argument("--theta", type=int, default=None, help="Sx eigenvalue for --source dicke")
    sens.add_argument("--t-int", type=float, default=1.0)
    sens.add_argument("--total-time", type=float, default=1.0)
    sens.add_argument("--out", default="spincat-out")
    sens.set_defaults(func=_cmd_sensitivity)

    parser._spincat_subparsers = {
        "simulate": sim,
        "pk": pk,
        "predict": pred,
        "references": refs,
        "fit": fit,
        "oracle-check": orc,
        "sensitivity": sens,
    }
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    try:
        if getattr(pre, "config", None):
            raw = _load_config_file(pre.config)
            typed = {key: _CONFIG_TYPES.get(key, str)(val) for key, val in raw.items()}
            # defaults must land on the subparser: it re-applies its own when parsing
            parser._spincat_subparsers[pre.command].set_defaults(**typed)
        args = parser.parse_args(argv)
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
