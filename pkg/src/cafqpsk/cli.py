"""Command-line front end: theta-sweep, acpr, simulate, threshold.

Config precedence is flags > JSON config file > built-in defaults; the
effective configuration is echoed to `<out>.config.json`. All outputs are
deterministic under a fixed seed.

Exit codes: 0 success, 1 configuration error, 2 numerical/bracket failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import de, infotheory, ldpc, sim
from .infotheory import IntegrationConfig
from .model import params_from_snr


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    """Locale-independent decimal with 6 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """flags > config file > defaults; unknown file keys rejected."""
    file_cfg = {}
    if args.config is not None:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
        elif key in file_cfg:
            cfg[key] = file_cfg[key]
        else:
            cfg[key] = default
    return cfg


def _write_rows(out: str, header: list[str], rows: list[list]):
    path = Path(out)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) if isinstance(x, (int, float, bool, np.number, np.bool_))
                        else str(x) for x in row])


def _echo_config(out: str, command: str, cfg: dict):
    side = Path(str(out) + ".config.json")
    side.write_text(json.dumps({"command": command, **cfg}, indent=2,
                               sort_keys=True) + "\n")


THETA_DEFAULTS = {
    "snr_a_db": 2.0,
    "snr_b_db": [2.0, 1.5],
    "theta_steps": 32,           # grid 0 .. pi/2 inclusive, pi/64 spacing
    "mi_method": "monte_carlo",
    "mc_samples": 200_000,
    "quad_nodes": 64,
    "seed": 0,
    "out": "theta_sweep.csv",
}


def cmd_theta_sweep(args) -> int:
    cfg = _merge_config(args, THETA_DEFAULTS)
    snr_bs = cfg["snr_b_db"]
    if not isinstance(snr_bs, (list, tuple)):
        snr_bs = [snr_bs]
    thetas = np.linspace(0.0, np.pi / 2, int(cfg["theta_steps"]) + 1)
    mi_cfg = IntegrationConfig(method=cfg["mi_method"],
                               mc_samples_per_component=int(cfg["mc_samples"]),
                               quad_nodes=int(cfg["quad_nodes"]),
                               seed=int(cfg["seed"]))
    rows = []
    for snr_b in snr_bs:
        for theta in thetas:
            p = params_from_snr(cfg["snr_a_db"], snr_b, sigma=0.7943, phi_a=theta)
            caf = infotheory.sir_caf(p, mi_cfg)
            sd = infotheory.sir_sd(p, mi_cfg)
            rows.append([theta, "caf", cfg["snr_a_db"], snr_b, caf.value, caf.std_error])
            rows.append([theta, "sd", cfg["snr_a_db"], snr_b, sd.value, sd.std_error])
    _write_rows(cfg["out"], ["theta_rad", "scheme", "snr_a_db", "snr_b_db",
                             "sir_bits", "std_err"], rows)
    _echo_config(cfg["out"], "theta-sweep", cfg)
    return 0


ACPR_SCHEME_LABELS = {
    "caf_lrc": ("caf", "lrc"),
    "sd_lrc_theta0": ("sd_theta0", "lrc"),
    "sd_lrc_theta45": ("sd_theta45", "lrc"),
    "caf_ldpc": ("caf", "ldpc_bp"),
    "sic_ldpc_theta0": ("sic_theta0", "ldpc_bp"),
    "sic_ldpc_theta45": ("sic_theta45", "ldpc_bp"),
}

ACPR_DEFAULTS = {
    "dv": 3,
    "dc": 6,
    "schemes": list(ACPR_SCHEME_LABELS),
    "grid_min_db": -2.0,
    "grid_max_db": 10.0,
    "grid_step_db": 0.25,
    "de_pop": 200_000,
    "de_max_iter": 200,
    "mi_method": "quadrature",
    "mc_samples": 200_000,
    "quad_nodes": 64,
    "seed": 0,
    "out": "acpr.csv",
}


def cmd_acpr(args) -> int:
    cfg = _merge_config(args, ACPR_DEFAULTS)
    unknown = set(cfg["schemes"]) - set(ACPR_SCHEME_LABELS)
    if unknown:
        raise ConfigError(f"unknown schemes: {sorted(unknown)}")
    grid = np.arange(cfg["grid_min_db"],
                     cfg["grid_max_db"] + 0.5 * cfg["grid_step_db"],
                     cfg["grid_step_db"])
    de_cfg = de.DeConfig(n_pop=int(cfg["de_pop"]), max_iter=int(cfg["de_max_iter"]),
                         seed=int(cfg["seed"]))
    mi_cfg = IntegrationConfig(method=cfg["mi_method"],
                               mc_samples_per_component=int(cfg["mc_samples"]),
                               quad_nodes=int(cfg["quad_nodes"]),
                               seed=int(cfg["seed"]))
    rate = 1.0 - cfg["dv"] / cfg["dc"]
    rows = []
    for scheme in cfg["schemes"]:
        label, decoder = ACPR_SCHEME_LABELS[scheme]
        g = de.acpr_scan(scheme, int(cfg["dv"]), int(cfg["dc"]), grid, grid,
                         de_cfg=de_cfg, mi_cfg=mi_cfg)
        for i, a in enumerate(g.snr_a_values):
            for j, b in enumerate(g.snr_b_values):
                rows.append([a, b, label, decoder, rate,
                             int(g.decodable[i, j]), g.status[i, j]])
    _write_rows(cfg["out"], ["snr_a_db", "snr_b_db", "scheme", "decoder",
                             "rate", "decodable", "status"], rows)
    _echo_config(cfg["out"], "acpr", cfg)
    return 0


SIM_DEFAULTS = {
    "scheme": "caf",
    "n": 1200,
    "dv": 3,
    "dc": 6,
    "snr_a_db": 4.0,
    "snr_b_db": 4.0,
    "max_iter": 100,
    "max_trials": 1_000_000,
    "min_block_errors": 100,
    "code_seed": 1,
    "code": None,
    "threads": 1,
    "seed": 0,
    "out": "ber.csv",
}


def cmd_simulate(args) -> int:
    cfg = _merge_config(args, SIM_DEFAULTS)
    if cfg["code"]:
        code = ldpc.from_alist(Path(cfg["code"]).read_text())
    else:
        code = ldpc.construct_regular(int(cfg["n"]), int(cfg["dv"]),
                                      int(cfg["dc"]), seed=int(cfg["code_seed"]))
    theta = {"caf": 0.0, "sic_theta0": 0.0, "sic_theta45": np.pi / 4}.get(cfg["scheme"])
    if theta is None:
        raise ConfigError(f"unknown scheme {cfg['scheme']!r}")
    p = params_from_snr(cfg["snr_a_db"], cfg["snr_b_db"])
    tcfg = sim.TrialConfig(cfg["scheme"], code, p, max_iter=int(cfg["max_iter"]),
                           max_trials=int(cfg["max_trials"]),
                           min_block_errors=int(cfg["min_block_errors"]),
                           seed=int(cfg["seed"]))
    rep = sim.estimate_error_rate(tcfg, threads=int(cfg["threads"]))
    rows = [[cfg["scheme"], code.n, cfg["snr_a_db"], cfg["snr_b_db"], theta,
             rep.trials, rep.block_errors, rep.bit_errors, rep.fer,
             rep.fer_lo, rep.fer_hi, rep.mean_iterations, int(cfg["seed"])]]
    _write_rows(cfg["out"], ["scheme", "n", "snr_a_db", "snr_b_db", "theta",
                             "trials", "block_errors", "bit_errors", "fer",
                             "fer_lo", "fer_hi", "mean_iters", "seed"], rows)
    _echo_config(cfg["out"], "simulate", cfg)
    return 0


THRESHOLD_DEFAULTS = {
    "dv": 3,
    "dc": 6,
    "channel": "biawgn",
    "lo": 0.5,
    "hi": 1.2,
    "tol": 0.005,
    "de_pop": 200_000,
    "de_max_iter": 400,
    "seed": 0,
    "out": None,
}


def cmd_threshold(args) -> int:
    cfg = _merge_config(args, THRESHOLD_DEFAULTS)
    de_cfg = de.DeConfig(n_pop=int(cfg["de_pop"]), max_iter=int(cfg["de_max_iter"]),
                         seed=int(cfg["seed"]))
    dv, dc = int(cfg["dv"]), int(cfg["dc"])
    if cfg["channel"] == "biawgn":
        th = de.biawgn_threshold(dv, dc, cfg["lo"], cfg["hi"], cfg["tol"], de_cfg)
    elif cfg["channel"] == "caf_diagonal":
        th = de.caf_diagonal_crossover(dv, dc, cfg["lo"], cfg["hi"], cfg["tol"], de_cfg)
    else:
        raise ConfigError(f"unknown channel {cfg['channel']!r}")
    result = {"ensemble": [dv, dc], "channel": cfg["channel"],
              "threshold": th, "tol": cfg["tol"]}
    text = json.dumps(result, indent=2) + "\n"
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
        _echo_config(cfg["out"], "threshold", cfg)
    else:
        sys.stdout.write(text)
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cafqpsk",
                                 description="CAF vs SD relaying experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("theta-sweep", help="SIR vs rotation-angle difference")
    _add_common(t)
    t.add_argument("--snr-a-db", dest="snr_a_db", type=float)
    t.add_argument("--snr-b-db", dest="snr_b_db", type=float, nargs="+")
    t.add_argument("--theta-steps", dest="theta_steps", type=int)
    t.add_argument("--mi-method", dest="mi_method",
                   choices=["monte_carlo", "quadrature"])
    t.add_argument("--mc-samples", dest="mc_samples", type=int)
    t.add_argument("--quad-nodes", dest="quad_nodes", type=int)
    t.set_defaults(func=cmd_theta_sweep)

    a = sub.add_parser("acpr", help="asymptotic channel parameter region scan")
    _add_common(a)
    a.add_argument("--dv", type=int)
    a.add_argument("--dc", type=int)
    a.add_argument("--schemes", nargs="+")
    a.add_argument("--grid-min-db", dest="grid_min_db", type=float)
    a.add_argument("--grid-max-db", dest="grid_max_db", type=float)
    a.add_argument("--grid-step-db", dest="grid_step_db", type=float)
    a.add_argument("--de-pop", dest="de_pop", type=int)
    a.add_argument("--de-max-iter", dest="de_max_iter", type=int)
    a.add_argument("--mi-method", dest="mi_method",
                   choices=["monte_carlo", "quadrature"])
    a.add_argument("--mc-samples", dest="mc_samples", type=int)
    a.add_argument("--quad-nodes", dest="quad_nodes", type=int)
    a.set_defaults(func=cmd_acpr)

    s = sub.add_parser("simulate", help="finite-length Monte Carlo trials")
    _add_common(s)
    s.add_argument("--scheme", choices=["caf", "sic_theta0", "sic_theta45"])
    s.add_argument("--n", type=int)
    s.add_argument("--dv", type=int)
    s.add_argument("--dc", type=int)
    s.add_argument("--snr-a-db", dest="snr_a_db", type=float)
    s.add_argument("--snr-b-db", dest="snr_b_db", type=float)
    s.add_argument("--max-iter", dest="max_iter", type=int)
    s.add_argument("--max-trials", dest="max_trials", type=int)
    s.add_argument("--min-block-errors", dest="min_block_errors", type=int)
    s.add_argument("--code-seed", dest="code_seed", type=int)
    s.add_argument("--code", help="alist parity-check file")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_simulate)

    th = sub.add_parser("threshold", help="DE threshold bisection")
    _add_common(th)
    th.add_argument("--dv", type=int)
    th.add_argument("--dc", type=int)
    th.add_argument("--channel", choices=["biawgn", "caf_diagonal"])
    th.add_argument("--lo", type=float)
    th.add_argument("--hi", type=float)
    th.add_argument("--tol", type=float)
    th.add_argument("--de-pop", dest="de_pop", type=int)
    th.add_argument("--de-max-iter", dest="de_max_iter", type=int)
    th.set_defaults(func=cmd_threshold)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
