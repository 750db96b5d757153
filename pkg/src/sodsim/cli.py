"""Command-line front end: config parsing, dataset I/O, and experiment
orchestration. All subcommands are deterministic functions of
(config, seed, input files).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys

import numpy as np

from . import baselines, datagen, experiments, solver
from .core import RngHandle, SodsimError
from .isotonic import StepLink, predict_link

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class ConfigError(SodsimError):
    pass


class DataError(SodsimError):
    pass


# section -> key -> (default, parser, validator description or None)
_SCHEMA = {
    "data": {
        "p": (100, int, lambda v: v >= 2),
        "n_pos": (400, int, lambda v: v >= 1),
        "n_unl": (400, int, lambda v: v >= 1),
        "rho": (0.2, float, lambda v: -1 < v < 1),
        "example": (1, int, lambda v: v in (1, 2)),
        "n": (400, int, lambda v: v >= 2),
        "epsilon": (0.1, float, lambda v: v > 0),
    },
    "sodsim": {
        "s": (10, int, lambda v: v >= 1),
        "eta": (0.1, float, lambda v: v > 0),
        "max_iter": (1000, int, lambda v: v >= 1),
        "param_tol": (5e-4, float, lambda v: v > 0),
    },
    "baselines": {
        "cv_folds": (5, int, lambda v: v >= 2),
        "lambda_count": (30, int, lambda v: v >= 2),
        "lambda_ratio": (0.01, float, lambda v: 0 < v < 1),
        "tol": (1e-5, float, lambda v: v > 0),
        "max_iter": (500, int, lambda v: v >= 1),
    },
    "experiment": {
        "reps": (100, int, lambda v: v >= 1),
        "p_list": ("100,400,800,1600", str, None),
        "n_list": ("100,150,200,300,400,600,800,1200", str, None),
        "increment": (0.001, float, lambda v: v > 0),
    },
}


def default_config() -> dict:
    return {sec: {k: spec[0] for k, spec in keys.items()} for sec, keys in _SCHEMA.items()}


def _apply_value(cfg: dict, section: str, key: str, raw: str, where: str):
    if section not in _SCHEMA:
        raise ConfigError(f"{where}: unknown section [{section}]")
    if key not in _SCHEMA[section]:
        raise ConfigError(f"{where}: unknown key {section}.{key}")
    _, parse, check = _SCHEMA[section][key]
    try:
        value = parse(raw)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {section}.{key}={raw!r}")
    if check is not None and not check(value):
        raise ConfigError(f"{where}: value out of range for {section}.{key}: {raw}")
    cfg[section][key] = value


def parse_config(path=None, overrides=()) -> dict:
    """Load the flat INI-style config, fill defaults, and apply
    section.key=value overrides (overrides win). Unknown keys are errors."""
    cfg = default_config()
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}")
        except configparser.Error as exc:
            raise ConfigError(f"config parse error in {path}: {exc}")
        for section in parser.sections():
            for key, raw in parser.items(section):
                _apply_value(cfg, section, key, raw, path)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        section, key = dotted.split(".", 1)
        _apply_value(cfg, section, key, raw, f"--set {item}")
    return cfg


def _int_list(raw: str) -> tuple:
    try:
        return tuple(int(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot parse integer list {raw!r}")


def read_dataset_csv(path, expect_two_columns=False):
    """Read a dataset CSV with columns x_1..x_p, y [, mu_star]."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [row for row in reader]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}")
    if header is None or not rows:
        raise DataError(f"{path}: empty dataset")
    x_cols = [c for c in header if c.startswith("x_")]
    expected = [f"x_{j + 1}" for j in range(len(x_cols))]
    if x_cols != expected or "y" not in header:
        raise DataError(
            f"{path}: expected columns x_1..x_p,y[,mu_star], got {header}")
    if expect_two_columns and len(x_cols) != 2:
        raise DataError(f"{path}: expected exactly 2 covariate columns, got {len(x_cols)}")
    data = np.asarray(rows, dtype=np.float64)
    cols = {name: data[:, i] for i, name in enumerate(header)}
    X = np.column_stack([cols[c] for c in expected])
    mu = cols.get("mu_star")
    return X, cols["y"], mu


def write_dataset_csv(path, X, y, mu_star=None):
    header = [f"x_{j + 1}" for j in range(X.shape[1])] + ["y"]
    blocks = [X, y[:, None]]
    if mu_star is not None:
        header.append("mu_star")
        blocks.append(mu_star[:, None])
    table = np.hstack(blocks)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in table:
            w.writerow([f"{v:.17g}" for v in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_fit(args, cfg):
    X, y, _ = read_dataset_csv(args.data)
    sod_cfg = solver.SodSimConfig(
        s=cfg["sodsim"]["s"], eta=cfg["sodsim"]["eta"],
        max_iter=cfg["sodsim"]["max_iter"], param_tol=cfg["sodsim"]["param_tol"],
        record_trajectory=True)
    fit = solver.fit(X, y, sod_cfg)
    nz = np.nonzero(fit.u_hat)[0]
    out = {
        "p": int(X.shape[1]),
        "u_hat": [[int(i), float(fit.u_hat[i])] for i in nz],
        "iterations": fit.iterations,
        "converged": fit.converged,
        "loss_trace": [[t, c, l] for t, c, l in fit.trajectory],
        "link": {"knots": fit.link.knots.tolist(), "levels": fit.link.levels.tolist()},
    }
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "fit.json"), out)
    with open(os.path.join(args.out, "link.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["knot", "level"])
        for k, l in zip(fit.link.knots, fit.link.levels):
            w.writerow([f"{k:.17g}", f"{l:.17g}"])
    print(f"fit: converged={fit.converged} iterations={fit.iterations}")
    return 0


def _load_fit_json(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read fit file {path}: {exc}")
    u = np.zeros(obj["p"])
    for i, v in obj["u_hat"]:
        u[i] = v
    link = StepLink(knots=np.asarray(obj["link"]["knots"]),
                    levels=np.asarray(obj["link"]["levels"]))
    return u, link


def cmd_eval(args, cfg):
    u_hat, link = _load_fit_json(args.fit)
    X, y, _ = read_dataset_csv(args.data)
    if X.shape[1] != u_hat.size:
        raise DataError(
            f"dimension mismatch: test has p={X.shape[1]}, fit has p={u_hat.size}")
    probs = predict_link(link, X @ u_hat)
    m = experiments.classification_metrics(probs, y, args.threshold)
    out = {"accuracy": m.accuracy, "f1": m.f1, "brier": m.brier,
           "auc": None if np.isnan(m.auc) else m.auc}
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "metrics.json"), out)
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_simulate_pu(args, cfg):
    d = cfg["data"]
    pu = datagen.gen_pu_dataset(datagen.PuConfig(
        p=d["p"], u_star=datagen.default_pu_u_star(d["p"]),
        seed=RngHandle(args.seed, 0), n_pos=d["n_pos"], n_unl=d["n_unl"],
        rho=d["rho"]))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "pu_data.csv")
    write_dataset_csv(path, pu.X, pu.y, pu.mu_star)
    print(f"wrote {path}")
    return 0


def cmd_pu_study(args, cfg):
    study = experiments.PuStudyConfig(
        seed=args.seed, reps=cfg["experiment"]["reps"],
        p_list=_int_list(cfg["experiment"]["p_list"]),
        n_pos=cfg["data"]["n_pos"], n_unl=cfg["data"]["n_unl"],
        rho=cfg["data"]["rho"], s=cfg["sodsim"]["s"], eta=cfg["sodsim"]["eta"],
        max_iter=cfg["sodsim"]["max_iter"], param_tol=cfg["sodsim"]["param_tol"],
        cv_folds=cfg["baselines"]["cv_folds"],
        lambda_count=cfg["baselines"]["lambda_count"],
        lambda_ratio=cfg["baselines"]["lambda_ratio"], threads=args.threads)
    rows = experiments.run_pu_comparison(study)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "pu_comparison.csv")
    experiments.write_pu_csv(rows, path)
    print(f"wrote {path}")
    return 0


def cmd_lowerbound(args, cfg):
    study = experiments.LowerBoundStudyConfig(
        example=cfg["data"]["example"], seed=args.seed,
        reps=cfg["experiment"]["reps"],
        n_list=_int_list(cfg["experiment"]["n_list"]),
        increment=cfg["experiment"]["increment"],
        epsilon=cfg["data"]["epsilon"], threads=args.threads)
    rows, slope = experiments.run_lowerbound_study(study)
    os.makedirs(args.out, exist_ok=True)
    experiments.write_lowerbound_csv(rows, os.path.join(args.out, "lowerbound.csv"))
    experiments.write_slope_csv([(study.example, slope)],
                                os.path.join(args.out, "slope.csv"))
    print(f"example {study.example}: slope={slope.slope:.4f} r2={slope.r_squared:.4f}")
    return 0


def cmd_gridmin(args, cfg):
    X, y, _ = read_dataset_csv(args.data, expect_two_columns=True)
    theta, u = experiments.grid_minimize_theta(X, y, cfg["experiment"]["increment"])
    out = {"theta_hat": theta, "u_hat": u.tolist()}
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "gridmin.json"), out)
    print(json.dumps(out, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sodsim",
        description="Sparse monotone single-index model estimator and experiment harness.",
        epilog="Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numerical error.")
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="config override (repeatable)")
    parser.add_argument("--threads", type=int, default=1, help="replication thread pool size")
    parser.add_argument("--print-defaults", action="store_true",
                        help="print the default config and exit")
    sub = parser.add_subparsers(dest="command")

    p_fit = sub.add_parser("fit", help="fit the solver on a dataset CSV")
    p_fit.add_argument("data", help="dataset CSV with columns x_1..x_p,y")

    p_eval = sub.add_parser("eval", help="evaluate a fit on a test CSV")
    p_eval.add_argument("fit", help="fit.json produced by the fit subcommand")
    p_eval.add_argument("data", help="test CSV with columns x_1..x_p,y")
    p_eval.add_argument("--threshold", type=float, default=0.5)

    p_sim = sub.add_parser("simulate-pu", help="generate a PU dataset CSV")
    del p_sim

    sub.add_parser("pu-study", help="run the PU method comparison")
    sub.add_parser("lowerbound", help="run the convergence-rate study")

    p_grid = sub.add_parser("gridmin", help="angle-grid global minimizer on a 2-column dataset")
    p_grid.add_argument("data", help="dataset CSV with columns x_1,x_2,y")
    return parser


_DISPATCH = {
    "fit": cmd_fit,
    "eval": cmd_eval,
    "simulate-pu": cmd_simulate_pu,
    "pu-study": cmd_pu_study,
    "lowerbound": cmd_lowerbound,
    "gridmin": cmd_gridmin,
}


def _print_defaults():
    for section, keys in _SCHEMA.items():
        print(f"[{section}]")
        for key, (default, _, _) in keys.items():
            print(f"{key} = {default}")
        print()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_defaults:
        _print_defaults()
        return 0
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        cfg = parse_config(args.config, args.overrides)
        return _DISPATCH[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SodsimError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
