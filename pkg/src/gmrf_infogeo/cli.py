"""Command-line entry point.

Three subcommands cover the experiment pipeline:

* ``simulate`` — drive one or more seeded chains through a beta schedule
  and write per-iteration ``trajectory.csv`` files plus ``run_meta.json``
  (and optional per-step snapshots);
* ``analyze`` — estimate the model from a single stored snapshot and print
  the summary (optionally as JSON);
* ``curve`` — rebuild Fisher curves from a stored trajectory, write the
  forward/backward legs and the hysteresis gap.

Configuration comes from flags and/or a ``key = value`` config file, flags
winning. Exit codes: 0 success, 2 usage or configuration error, 1 internal
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .curve import build_fisher_curve, canonical_component, export_curve, hysteresis_gap
from .gmrf import ModelParams
from .infogeo import FisherTensor, field_estimates
from .lattice import new_iid_configuration, read_snapshot
from .sampler import MODES, SAMPLERS, Schedule, TrajectoryRecord, run_schedule

THREADS_ENV = "GMRF_INFOGEO_THREADS"

TRAJECTORY_HEADER = (
    "iteration,beta_set,mu_hat,sigma2_hat,beta_mpl,H,"
    "g1_mumu,g1_s2s2,g1_s2b,g1_bb,g2_mumu,g2_s2s2,g2_s2b,g2_bb,"
    "upsilon_beta,acceptance_rate,degenerate"
)


@dataclass(frozen=True)
class RunConfig:
    """Full configuration of one simulate run (defaults are desk scale)."""

    rows: int = 128
    cols: int = 128
    mu0: float = 0.0
    sigma2_0: float = 5.0
    beta_min: float = 0.0
    beta_max: float = 0.5
    delta_beta: float = 0.005
    mode: str = "up-then-down"
    sampler: str = "metropolis"
    proposal_std: float | None = None  # None = adaptive sqrt(sigma2_hat)
    sweeps_per_step: int = 1
    seed: int = 0
    out_dir: str = "gmrf-run"
    dump_snapshots: bool = False
    steps_per_leg: int | None = None  # forces a step count (null schedules)

    def validate(self) -> None:
        if self.rows < 3 or self.cols < 3:
            raise ValueError("rows and cols must be at least 3")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}")
        if self.proposal_std is not None and not self.proposal_std > 0:
            raise ValueError("proposal_std must be positive")
        if self.sweeps_per_step < 1:
            raise ValueError("sweeps_per_step must be positive")
        # these raise on bad ranges/modes
        ModelParams(mu=self.mu0, sigma2=self.sigma2_0, beta=0.0)
        self.schedule()

    def schedule(self) -> Schedule:
        steps = self.steps_per_leg
        if steps is None and round((self.beta_max - self.beta_min) / self.delta_beta) < 1:
            # constant-beta runs (beta_max == beta_min) would otherwise have
            # zero steps; hold beta for one step per leg so rows are emitted
            steps = 1
        return Schedule(
            beta_min=self.beta_min,
            beta_max=self.beta_max,
            delta_beta=self.delta_beta,
            mode=self.mode,
            steps_per_leg=steps,
        )


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


_FIELD_PARSERS = {
    "rows": int,
    "cols": int,
    "mu0": float,
    "sigma2_0": float,
    "beta_min": float,
    "beta_max": float,
    "delta_beta": float,
    "mode": str,
    "sampler": str,
    "proposal_std": float,
    "sweeps_per_step": int,
    "seed": int,
    "out_dir": str,
    "dump_snapshots": _parse_bool,
    "steps_per_leg": int,
}


def _parse_config_file(path: str) -> dict:
    """Read a key = value config file (# starts a comment)."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in _FIELD_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _FIELD_PARSERS[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return values


def _build_config(args: argparse.Namespace) -> RunConfig:
    values = asdict(RunConfig())
    if args.config is not None:
        values.update(_parse_config_file(args.config))
    for field in fields(RunConfig):
        flag_value = getattr(args, field.name, None)
        if flag_value is not None:
            values[field.name] = flag_value
    config = RunConfig(**values)
    config.validate()
    return config


def _format_value(value: float) -> str:
    return f"{value:.17g}"


def _write_trajectory(path: str, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for r in records:
            cells = [str(r.iteration)]
            cells += [
                _format_value(v)
                for v in (
                    r.beta_set, r.mu_hat, r.sigma2_hat, r.beta_mpl, r.entropy,
                    r.g1.x, r.g1.y, r.g1.w, r.g1.z,
                    r.g2.x, r.g2.y, r.g2.w, r.g2.z,
                    r.upsilon_beta, r.acceptance_rate,
                )
            ]
            cells.append(str(int(r.degenerate)))
            fh.write(",".join(cells) + "\n")


def read_trajectory(path: str) -> list[TrajectoryRecord]:
    """Parse a trajectory.csv back into records (inverse of simulate)."""
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or ",".join(reader.fieldnames) != TRAJECTORY_HEADER:
            raise ValueError(f"{path}: unexpected trajectory header")
        for row in reader:
            g1 = FisherTensor(
                x=float(row["g1_mumu"]), y=float(row["g1_s2s2"]),
                z=float(row["g1_bb"]), w=float(row["g1_s2b"]), kind="type-1",
            )
            g2 = FisherTensor(
                x=float(row["g2_mumu"]), y=float(row["g2_s2s2"]),
                z=float(row["g2_bb"]), w=float(row["g2_s2b"]), kind="type-2",
            )
            records.append(
                TrajectoryRecord(
                    iteration=int(row["iteration"]),
                    beta_set=float(row["beta_set"]),
                    mu_hat=float(row["mu_hat"]),
                    sigma2_hat=float(row["sigma2_hat"]),
                    beta_mpl=float(row["beta_mpl"]),
                    entropy=float(row["H"]),
                    g1=g1,
                    g2=g2,
                    upsilon_beta=float(row["upsilon_beta"]),
                    acceptance_rate=float(row["acceptance_rate"]),
                    degenerate=bool(int(row["degenerate"])),
                )
            )
    return records


def _run_one_chain(config: RunConfig, out_dir: str, init_seed, chain_seed) -> None:
    os.makedirs(out_dir, exist_ok=True)
    initial = new_iid_configuration(
        config.rows, config.cols, config.mu0, config.sigma2_0, init_seed
    )
    params = ModelParams(mu=config.mu0, sigma2=config.sigma2_0, beta=0.0)
    dump_dir = None
    if config.dump_snapshots:
        dump_dir = os.path.join(out_dir, "snapshots")
        os.makedirs(dump_dir, exist_ok=True)
    records = run_schedule(
        config.schedule(),
        initial,
        params,
        sampler_choice=config.sampler,
        sweeps_per_step=config.sweeps_per_step,
        seed=chain_seed,
        proposal_std=config.proposal_std,
        dump_dir=dump_dir,
    )
    _write_trajectory(os.path.join(out_dir, "trajectory.csv"), records)


def _max_workers(replicas: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV} must be positive, got {cap}")
    return max(1, min(replicas, cap))


def cmd_simulate(config: RunConfig, replicas: int = 1) -> int:
    """Run the configured schedule; with replicas > 1, one chain per seed."""
    if replicas < 1:
        raise ValueError("replicas must be positive")
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    meta = {
        "config": asdict(config),
        "replicas": replicas,
        "version": __version__,
    }
    with open(
        os.path.join(config.out_dir, "run_meta.json"), "w", encoding="utf-8"
    ) as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    children = np.random.SeedSequence(config.seed).spawn(replicas)
    if replicas == 1:
        init_seed, chain_seed = children[0].spawn(2)
        _run_one_chain(config, config.out_dir, init_seed, chain_seed)
        return 0
    jobs = []
    for index, child in enumerate(children):
        init_seed, chain_seed = child.spawn(2)
        out_dir = os.path.join(config.out_dir, f"replica_{index:02d}")
        jobs.append((config, out_dir, init_seed, chain_seed))
    with ProcessPoolExecutor(max_workers=_max_workers(replicas)) as pool:
        futures = [pool.submit(_run_one_chain, *job) for job in jobs]
        for future in futures:
            future.result()
    return 0


def _estimate_payload(snapshot_path: str) -> dict:
    config, beta_set = read_snapshot(snapshot_path)
    est = field_estimates(config)
    return {
        "snapshot": snapshot_path,
        "rows": config.rows,
        "cols": config.cols,
        "beta_set": beta_set,
        "mu_hat": est.mu_hat,
        "sigma2_hat": est.sigma2_hat,
        "beta_mpl": est.beta_mpl,
        "entropy": est.entropy,
        "upsilon_beta": est.upsilon_beta,
        "g1": {"mumu": est.g1.x, "s2s2": est.g1.y, "s2b": est.g1.w, "bb": est.g1.z},
        "g2": {"mumu": est.g2.x, "s2s2": est.g2.y, "s2b": est.g2.w, "bb": est.g2.z},
        "degenerate": est.degenerate,
    }


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def cmd_analyze(snapshot_path: str, as_json: bool = False) -> int:
    """Estimate the model from one snapshot and print the summary."""
    payload = _estimate_payload(snapshot_path)
    if as_json:
        print(json.dumps(_jsonable(payload), indent=2))
        return 0
    print(f"snapshot       {payload['snapshot']}")
    print(f"lattice        {payload['rows']} x {payload['cols']}")
    print(f"beta_set       {payload['beta_set']:.17g}")
    print(f"mu_hat         {payload['mu_hat']:.17g}")
    print(f"sigma2_hat     {payload['sigma2_hat']:.17g}")
    print(f"beta_mpl       {payload['beta_mpl']:.17g}")
    print(f"entropy        {payload['entropy']:.17g}")
    print(f"upsilon_beta   {payload['upsilon_beta']:.17g}")
    for kind in ("g1", "g2"):
        tensor = payload[kind]
        print(
            f"{kind}             "
            + "  ".join(f"{name}={tensor[name]:.17g}" for name in ("mumu", "s2s2", "s2b", "bb"))
        )
    print(f"degenerate     {payload['degenerate']}")
    return 0


def cmd_curve(
    trajectory_path: str,
    component: str,
    format: str = "csv",
    out_dir: str | None = None,
) -> int:
    """Rebuild both curve legs from a trajectory and write them plus the gap."""
    component = canonical_component(component)
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    records = read_trajectory(trajectory_path)
    forward = build_fisher_curve(records, component, "forward")
    backward = build_fisher_curve(records, component, "backward")
    gap = hysteresis_gap(forward, backward)
    if out_dir is None:
        out_dir = os.path.dirname(os.path.abspath(trajectory_path))
    os.makedirs(out_dir, exist_ok=True)
    for curve in (forward, backward):
        name = f"{curve.leg}_{component}.{format}"
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(export_curve(curve, format))
    with open(os.path.join(out_dir, "gap.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"{gap:.17g}\n")
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmrf-infogeo",
        description="Simulate, analyze, and trace Fisher curves of a "
        "Gaussian-Markov random field.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a beta-schedule experiment")
    sim.add_argument("--config", help="key = value config file; flags override")
    sim.add_argument("--rows", type=int)
    sim.add_argument("--cols", type=int)
    sim.add_argument("--mu0", type=float)
    sim.add_argument("--sigma2", type=float, dest="sigma2_0")
    sim.add_argument("--beta-min", type=float)
    sim.add_argument("--beta-max", type=float)
    sim.add_argument("--delta-beta", type=float)
    sim.add_argument("--steps-per-leg", type=int)
    sim.add_argument("--mode", choices=MODES)
    sim.add_argument("--sampler", choices=SAMPLERS)
    sim.add_argument("--proposal-std", type=float)
    sim.add_argument("--sweeps-per-step", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", dest="out_dir")
    sim.add_argument(
        "--dump-snapshots", action=argparse.BooleanOptionalAction, default=None
    )
    sim.add_argument("--replicas", type=int, default=1)

    ana = sub.add_parser("analyze", help="estimate the model from a snapshot")
    ana.add_argument("snapshot")
    ana.add_argument("--json", action="store_true")

    cur = sub.add_parser("curve", help="export Fisher curves from a trajectory")
    cur.add_argument("trajectory")
    cur.add_argument("component", help="mumu, s2s2, s2b, or bb")
    cur.add_argument("--format", choices=("csv", "json"), default="csv")
    cur.add_argument("--out", dest="out_dir")
    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            config = _build_config(args)
            return cmd_simulate(config, replicas=args.replicas)
        if args.command == "analyze":
            return cmd_analyze(args.snapshot, as_json=args.json)
        return cmd_curve(
            args.trajectory, args.component, format=args.format, out_dir=args.out_dir
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
