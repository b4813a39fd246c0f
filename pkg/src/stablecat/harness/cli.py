"""Command line entry point: ``stablecat <command> [--config FILE] [--seed N] [--out DIR]``.

Every command writes CSV tables, ``summary.json`` (config hash, seeds,
version) and the effective ``config.json`` into ``--out``. The worker count
for FFTs comes from the ``STABLECAT_WORKERS`` environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from scipy import fft

from .. import __version__
from ..constants import estimate_constants
from ..estimator import results_to_csv
from ..lattice import Lattice
from ..medium.field import window_for
from ..medium.io import write_sample
from ..medium.sampler import sample_stable_measure
from ..pde.config import critical_index, variance_index
from ..seeding import child_seed
from .bounds import evaluate_multitime_bounds
from .config import ExperimentConfig, canonical_json, load, persist
from .lln import run_lln
from .sweep import run_fluctuation_sweep
from .validate import (checks_to_csv, medium_suite, reactant_homogeneous, reactant_quenched, scaling_suite)
from .variance import threshold_study

WORKERS_ENV = "STABLECAT_WORKERS"


def _constants(cfg: ExperimentConfig):
    return estimate_constants(cfg.d, cfg.gamma, cfg.rho, cfg.constant_paths, cfg.constant_horizon,
                              dt=cfg.constant_dt, seed=child_seed(cfg.seed, 0))


def cmd_sweep(cfg: ExperimentConfig, out: Path) -> dict:
    rep = run_fluctuation_sweep(cfg, _constants(cfg))
    (out / "sweep.csv").write_text(rep.to_csv())
    (out / "sweep_media.csv").write_text(rep.media_csv())
    return rep.summary()


def cmd_lln(cfg: ExperimentConfig, out: Path) -> dict:
    if cfg.kappa is None:
        cfg = dataclasses.replace(cfg, kappa=0.0)
    ks = tuple(cfg.extra.get("lln_k_grid", (4, 8, 16, 32)))
    rep = run_lln(cfg, ks=ks, direct=bool(cfg.extra.get("lln_direct", False)))
    (out / "lln.csv").write_text(rep.to_csv())
    return rep.summary()


def cmd_variance(cfg: ExperimentConfig, out: Path) -> dict:
    opts = dict(cfg.extra.get("variance", {}))
    d = int(opts.pop("d", 5))
    gamma = float(opts.pop("gamma", cfg.gamma))
    rep = threshold_study(gamma, d, cfg.rho, seed=child_seed(cfg.seed, 3), **opts)
    lines = ["k,kappa,median_log_variance"]
    for kp in rep.kappas:
        lines += [f"{k!r},{kp!r},{v!r}" for k, v in zip(rep.ks, map(float, rep.median_log_var[kp]))]
    (out / "variance.csv").write_text("\n".join(lines) + "\n")
    return {"kappa_var": rep.kappa_var, "slopes": {repr(k): v for k, v in rep.slopes.items()},
            "increasing_above": rep.increasing_above, "decreasing_below": rep.decreasing_below}


def cmd_bounds(cfg: ExperimentConfig, out: Path) -> dict:
    consts = _constants(cfg)
    lat = Lattice(cfg.d, cfg.ref_n, cfg.L)
    mu, phi = cfg.mu(lat), cfg.phi()
    schedules = {"single": [(cfg.t, phi)], "two_times": [(cfg.t / 2, phi), (cfg.t, phi)]}
    lines = ["schedule,upper,lower"]
    for name, sched in schedules.items():
        up, lo = evaluate_multitime_bounds(mu, sched, cfg.gamma, consts, lat)
        lines.append(f"{name},{up!r},{lo!r}")
    (out / "bounds.csv").write_text("\n".join(lines) + "\n")
    return {"c_bar": consts.c_bar.value, "c_under": consts.c_under.value}


def cmd_constants(cfg: ExperimentConfig, out: Path) -> dict:
    consts = _constants(cfg)
    (out / "constants.csv").write_text(results_to_csv({"c_bar": consts.c_bar, "c_under": consts.c_under}))
    return {"c_bar": consts.c_bar.value, "c_under": consts.c_under.value, "separation": consts.separation,
            "c_ba1": consts.c_ba1}


def cmd_medium_sample(cfg: ExperimentConfig, out: Path) -> dict:
    k = max(cfg.k_grid)
    lo, hi = window_for(cfg.lattice(k), k)
    s = sample_stable_measure((lo, hi), cfg.gamma, cfg.eps_min, 1.0, child_seed(cfg.seed, 1, 0))
    write_sample(s, out / "medium.bin")
    (out / "medium.csv").write_text(f"k,atoms,eps_min,drift\n{k!r},{len(s)},{s.eps_min!r},{s.drift!r}\n")
    return {"atoms": len(s), "k": k}


def cmd_medium_validate(cfg: ExperimentConfig, out: Path) -> dict:
    n = int(cfg.extra.get("medium_samples", 10_000))
    checks = medium_suite(cfg.d, cfg.gamma, n, child_seed(cfg.seed, 4))
    (out / "medium_validation.csv").write_text(checks_to_csv(checks))
    lines = ["k,exponent,statistic,critical_value,pvalue,passed"]
    for k in (2, 4):
        for label, p in (("d/gamma", None), ("control", cfg.d / cfg.gamma + 1.0)):
            r = scaling_suite(cfg.d, cfg.gamma, k, seed=child_seed(cfg.seed, 5, k), exponent=p)
            lines.append(f"{k},{label},{r.statistic!r},{r.critical_value!r},{r.pvalue!r},{int(r.passed)}")
    (out / "medium_scaling.csv").write_text("\n".join(lines) + "\n")
    return {"checks_passed": all(c.passed() for c in checks)}


def cmd_reactant_validate(cfg: ExperimentConfig, out: Path) -> dict:
    runs = int(cfg.extra.get("reactant_runs", 2000))
    checks = [reactant_homogeneous(2 * runs, child_seed(cfg.seed, 6))]
    checks += [reactant_quenched(child_seed(cfg.seed, 7, j), runs, child_seed(cfg.seed, 8, j))
               for j in range(3)]
    (out / "reactant_validation.csv").write_text(checks_to_csv(checks))
    return {"checks_passed": all(c.passed() for c in checks)}


COMMANDS = {
    ("sweep",): cmd_sweep,
    ("lln",): cmd_lln,
    ("variance",): cmd_variance,
    ("bounds",): cmd_bounds,
    ("constants",): cmd_constants,
    ("medium", "sample"): cmd_medium_sample,
    ("medium", "validate"): cmd_medium_validate,
    ("reactant", "validate"): cmd_reactant_validate,
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="versioned JSON experiment config")
    p.add_argument("--seed", type=int, help="root seed (overrides the config)")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablecat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sweep", "lln", "variance", "bounds", "constants"):
        _common(sub.add_parser(name))
    for group, actions in (("medium", ("sample", "validate")), ("reactant", ("validate",))):
        g = sub.add_parser(group).add_subparsers(dest="action", required=True)
        for a in actions:
            _common(g.add_parser(a))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise SystemExit("seed must be an unsigned 64-bit integer")
        cfg = dataclasses.replace(cfg, seed=args.seed)
    key = (args.command,) + ((args.action,) if getattr(args, "action", None) else ())
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    persist(cfg, out / "config.json")
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    with fft.set_workers(workers):
        result = COMMANDS[key](cfg, out)
    summary = {"command": " ".join(key), "config_hash": cfg.digest(), "seed": cfg.seed, "version": __version__,
               "kappa_c": critical_index(cfg.gamma, cfg.d), "kappa_var": variance_index(cfg.gamma, cfg.d),
               "result": result}
    (out / "summary.json").write_text(canonical_json(summary))
    json.dump({"out": str(out), **{k: summary[k] for k in ("command", "config_hash")}}, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
