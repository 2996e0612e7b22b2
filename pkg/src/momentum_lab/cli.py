"""Command-line front end.

Every subcommand builds a report ``{command, config, results, pass, version}``,
optionally writes it as JSON (``--out``) and exits 0 on pass, 1 on a failed
verification and 2 on a usage or configuration error.

Config precedence: flags > ``--config`` JSON file > defaults.  The seed falls
back to ``MOMENTUM_LAB_SEED`` when neither a flag nor the config file sets it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import MomentumLabError
from .geomcone import cone_duality_suite
from .kostant import parse_a_coords, verify_kostant, verify_leaf_equality, write_points_csv
from .leaf import EXAMPLE_N, Leaf, check_leaf_properties, example_so14
from .iwasawa import roundtrip_suite
from .liecore import FAMILY_NAMES, make_family
from .localmodel import inner_point_suite, local_max_agreement_suite
from .symplin import equivalence_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "MOMENTUM_LAB_SEED"

DEFAULTS = {
    "lemma212": {"trials": 200, "dim_max": 10},
    "cone-suite": {"samples": 100},
    "localmodel-suite": {"samples": 50, "probes": 20, "s0": 0.01},
    "kostant": {"family": "sl2r", "Y": "1", "samples": 10_000},
    "leaf-check": {"family": "sl2c", "samples": 100},
    "leaf-equality": {"family": "sl2c", "samples": 10_000},
    "iwasawa-suite": {"samples": 1000},
    "example-so14": {},
    "all": {},
}


class UsageError(Exception):
    pass


def _float_list(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse coordinates {text!r}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit unsigned seed")
    common.add_argument("--out", default=None, help="write the JSON report here")
    common.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    common.add_argument("--config", default=None, help="JSON file with option defaults")

    p = argparse.ArgumentParser(prog="momentum-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lemma212", parents=[common], help="involution equivalence suite")
    s.add_argument("--trials", type=int)
    s.add_argument("--dim-max", type=int)

    s = sub.add_parser("cone-suite", parents=[common], help="dual cone biduality and fullness")
    s.add_argument("--samples", type=int, help="random cones per dimension")

    s = sub.add_parser("localmodel-suite", parents=[common], help="local max and inner point checks")
    s.add_argument("--samples", type=int, help="random models for the local max comparison")
    s.add_argument("--probes", type=int, help="planted models for the inner point probe")
    s.add_argument("--s0", type=float)

    for name, help_text in (("kostant", "Iwasawa projection image vs Weyl orbit hull"),
                            ("leaf-equality", "real vs complex leaf images")):
        s = sub.add_parser(name, parents=[common], help=help_text)
        s.add_argument("--family")
        s.add_argument("--samples", type=int)
        s.add_argument("--gap-max", type=float)
        s.add_argument("--tol-in", type=float)
        if name == "kostant":
            s.add_argument("--Y", dest="Y")
            s.add_argument("--tol-v", type=float)
            s.add_argument("--points-csv", default=None)
        else:
            s.add_argument("--a")

    s = sub.add_parser("leaf-check", parents=[common], help="leaf Lagrangian/equivariance/invariance residuals")
    s.add_argument("--family")
    s.add_argument("--a")
    s.add_argument("--samples", type=int)

    s = sub.add_parser("iwasawa-suite", parents=[common], help="factorization round trips")
    s.add_argument("--family", default=None)
    s.add_argument("--samples", type=int)

    s = sub.add_parser("example-so14", parents=[common], help="omega at a fixed point of the SO(1,4) leaf")
    s.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)

    sub.add_parser("all", parents=[common], help="run every suite at acceptance settings")
    return p


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_") if k != "Y" else k: v for k, v in loaded.items()})
    for key, value in vars(args).items():
        if key in ("command", "config", "out", "json") or value is None:
            continue
        cfg[key] = value
    if args.seed is None and "seed" not in cfg:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                cfg["seed"] = int(env)
            except ValueError:
                raise UsageError(f"{SEED_ENV} must be an integer") from None
    cfg.setdefault("seed", 0)
    if not 0 <= int(cfg["seed"]) < 2 ** 64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if not cfg.get("perturb"):
        cfg.pop("perturb", None)
    return cfg


def _family(name, complexified=None):
    if name not in FAMILY_NAMES:
        raise UsageError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")
    fam = make_family(name)
    if complexified is not None and fam.complexified != complexified:
        kind = "complexified" if complexified else "real"
        raise UsageError(f"{name} is not a {kind} family")
    return fam


def _positive(cfg, key):
    v = cfg.get(key)
    if v is None or int(v) < 1:
        raise UsageError(f"--{key.replace('_', '-')} must be >= 1")
    return int(v)


# ---------------------------------------------------------------------------
# commands; each returns (results, passed)

def run_lemma212(cfg):
    trials = _positive(cfg, "trials")
    dmax = int(cfg["dim_max"])
    if dmax < 2 or dmax > 10 or dmax % 2:
        raise UsageError("--dim-max must be even and between 2 and 10")
    r = equivalence_suite(trials, int(cfg["seed"]), tuple(range(2, dmax + 1, 2)))
    return r, r["pass"]


def run_cone_suite(cfg):
    r = cone_duality_suite(_positive(cfg, "samples"), int(cfg["seed"]))
    return r, r["pass"]


def run_localmodel_suite(cfg):
    seed = int(cfg["seed"])
    lm = local_max_agreement_suite(_positive(cfg, "samples"), seed)
    ip = inner_point_suite(_positive(cfg, "probes"), seed, float(cfg["s0"]))
    return {"local_max": lm, "inner_point": ip}, lm["pass"] and ip["pass"]


def run_kostant(cfg):
    fam = _family(cfg["family"], complexified=False)
    try:
        y = parse_a_coords(fam, _float_list(cfg["Y"]))
    except MomentumLabError as exc:
        raise UsageError(str(exc)) from None
    kw = {k: float(cfg[k]) for k in ("tol_in", "tol_v", "gap_max") if cfg.get(k) is not None}
    report, pts = verify_kostant(fam, y, _positive(cfg, "samples"), int(cfg["seed"]),
                                 return_points=True, **kw)
    if cfg.get("points_csv"):
        write_points_csv(cfg["points_csv"], pts)
    return report.to_dict(), report.passed


def _leaf_from(cfg):
    if cfg.get("a") is None:
        raise UsageError("--a is required")
    fam = _family(cfg["family"], complexified=True)
    try:
        return Leaf(fam, parse_a_coords(fam, _float_list(cfg["a"])))
    except MomentumLabError as exc:
        raise UsageError(str(exc)) from None


def run_leaf_check(cfg):
    leaf = _leaf_from(cfg)
    rep = check_leaf_properties(leaf, _positive(cfg, "samples"), int(cfg["seed"]))
    return rep.to_dict(), rep.passed


def run_leaf_equality(cfg):
    leaf = _leaf_from(cfg)
    kw = {k: float(cfg[k]) for k in ("tol_in", "gap_max") if cfg.get(k) is not None}
    rep = verify_leaf_equality(leaf, _positive(cfg, "samples"), int(cfg["seed"]), **kw)
    return rep.to_dict(), rep.passed


def run_iwasawa_suite(cfg):
    names = [cfg["family"]] if cfg.get("family") else list(FAMILY_NAMES)
    for n in names:
        _family(n)
    res = {n: roundtrip_suite(make_family(n), _positive(cfg, "samples"), int(cfg["seed"])) for n in names}
    return res, all(r["pass"] for r in res.values())


def run_example_so14(cfg):
    n = EXAMPLE_N.copy()
    if cfg.get("perturb"):
        # negative control: an element of the same group, no longer the fixture
        n = n @ np.array([[np.cosh(cfg["perturb"]), 0, 0, 0, np.sinh(cfg["perturb"])],
                          [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0],
                          [np.sinh(cfg["perturb"]), 0, 0, 0, np.cosh(cfg["perturb"])]])
    r = example_so14(n)
    results = {"omega": r.omega, "log_a": r.log_a, "stage_errors": r.stage_errors,
               "leaf_coordinate_error": r.leaf_b_error,
               "ad_x": r.ad_x, "ad_y": r.ad_y, "pr_u_x": r.pr_u_x,
               "product_diagonal": r.product_diagonal}
    return results, r.matches(tol_matrix=1e-9) and r.leaf_b_error <= 1e-9


def run_all(cfg):
    seed = int(cfg["seed"])
    battery = {
        "example-so14": (run_example_so14, {}),
        "kostant-sl2r": (run_kostant, {"family": "sl2r", "Y": "1", "samples": 10_000}),
        "kostant-sl3r": (run_kostant, {"family": "sl3r", "Y": "1,0,-1", "samples": 200_000}),
        "lemma212": (run_lemma212, {"trials": 200, "dim_max": 10}),
        "cone-suite": (run_cone_suite, {"samples": 100}),
        "localmodel-suite": (run_localmodel_suite, {"samples": 50, "probes": 20, "s0": 0.01}),
        "leaf-check-sl2c": (run_leaf_check, {"family": "sl2c", "a": "0.7", "samples": 100}),
        "leaf-check-so5c": (run_leaf_check, {"family": "so5c", "a": "0.5", "samples": 50}),
        "leaf-equality-sl2c": (run_leaf_equality, {"family": "sl2c", "a": "1", "samples": 10_000}),
        "iwasawa-suite": (run_iwasawa_suite, {"samples": 1000}),
    }
    results = {}
    ok = True
    for name, (fn, sub_cfg) in battery.items():
        res, passed = fn({**sub_cfg, "seed": seed})
        results[name] = {"pass": passed, "results": res}
        ok &= passed
    return results, ok


COMMANDS = {
    "lemma212": run_lemma212,
    "cone-suite": run_cone_suite,
    "localmodel-suite": run_localmodel_suite,
    "kostant": run_kostant,
    "leaf-check": run_leaf_check,
    "leaf-equality": run_leaf_equality,
    "iwasawa-suite": run_iwasawa_suite,
    "example-so14": run_example_so14,
    "all": run_all,
}


def _summary(command, results, passed) -> str:
    if command == "example-so14":
        lines = [f"{k}:\n{np.array2string(np.round(results[k], 12) + 0.0, precision=4)}"
                 for k in ("ad_x", "ad_y", "pr_u_x")]
        lines.append(f"diag(pr_u(Ad(n)^-1 X) Ad(n)^-1 Y) = {np.round(results['product_diagonal'], 12) + 0.0}")
        lines.append(f"omega = {results['omega']:.9f}")
        return "\n".join(lines) + f"\n{command}: {'PASS' if passed else 'FAIL'}"
    if command == "all":
        lines = [f"{name}: {'PASS' if r['pass'] else 'FAIL'}" for name, r in results.items()]
        return "\n".join(lines) + f"\nall: {'PASS' if passed else 'FAIL'}"
    return f"{command}: {'PASS' if passed else 'FAIL'}"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        cfg = resolve_config(args)
        results, passed = COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MomentumLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"command": args.command, "config": _jsonable(cfg), "results": _jsonable(results),
              "pass": bool(passed), "version": __version__}
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_USAGE
    print(text if args.json else _summary(args.command, results, passed))
    return EXIT_PASS if passed else EXIT_FAIL
