"""Batch command line driver: ``breather-lab {bands,gap-check,rayleigh,breather,verify}``.

Exit codes: 0 success, 1 verification failure, 2 invalid parameters, 64 usage.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli
from threadpoolctl import threadpool_limits

from . import __version__
from .errors import InvalidParameters
from .floquet import band_report, certify_gap_growth, discriminant_mode, gap_radius, mode_closed_form_args
from .modal import Grid, h1_ratio, mode_basis, mode_bases
from .nehari import PowerNonlinearity, SolverConfig, outer_minimize
from .potential import validate_v1, validate_v2
from .spacetime import state_rows, synthesize
from .suites import FAULTS, run_all

log = logging.getLogger("breather_lab")

EXIT_OK, EXIT_FAIL, EXIT_PARAMS, EXIT_USAGE = 0, 1, 2, 64

SOLVER_KEYS = {"k_max", "periods", "nodes", "n_t", "inner_tol", "outer_tol", "residual_tol",
               "polish_tol", "max_iter", "max_inner", "max_newton", "armijo_c", "armijo_shrink",
               "seed_noise", "seed_width"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    case: str = "v1"
    alpha: float = 1.0
    beta: float = 64.0
    theta: float = 0.05
    tau: float = 0.0
    seed: int = 0
    out: str = "out"
    p: float = 1.8
    gamma_coeff: float = 1.0
    sign: int = 1
    solver: dict = field(default_factory=dict)
    inject_fault: str = ""

    @classmethod
    def from_mapping(cls, data):
        data = dict(data)
        solver = dict(data.pop("solver", {}))
        verify = dict(data.pop("verify", {}))
        for key in list(data):
            if key in SOLVER_KEYS:
                solver[key] = data.pop(key)
        for key in ("p", "gamma_coeff", "sign"):
            if key in solver:
                data[key] = solver.pop(key)
        unknown = set(solver) - SOLVER_KEYS
        if unknown:
            raise UsageError(f"unknown solver keys: {sorted(unknown)}")
        if "inject_fault" in verify:
            data["inject_fault"] = verify.pop("inject_fault")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(solver=solver, **data)
        cfg.sign = _parse_sign(cfg.sign)
        if cfg.case not in ("v1", "v2"):
            raise UsageError(f"case must be 'v1' or 'v2', got {cfg.case!r}")
        if cfg.inject_fault and cfg.inject_fault not in FAULTS:
            raise UsageError(f"unknown fault {cfg.inject_fault!r}; known: {FAULTS}")
        return cfg

    @classmethod
    def load(cls, path):
        text = Path(path).read_text(encoding="utf-8")
        if not text.strip():
            raise UsageError(f"config file {path} is empty")
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise UsageError(f"cannot parse {path}: {exc}") from exc
        if not data:
            raise UsageError(f"config file {path} defines no keys")
        return cls.from_mapping(data)

    def params(self):
        if self.case == "v1":
            return validate_v1(self.alpha, self.beta, self.tau)
        return validate_v2(self.alpha, self.theta, self.tau)

    def solver_config(self):
        return SolverConfig(sign=self.sign, seed=self.seed, **self.solver)

    def nonlinearity(self):
        return PowerNonlinearity(self.p, self.gamma_coeff)

    def resolved(self):
        out = {k: getattr(self, k) for k in ("case", "alpha", "tau", "seed", "p", "gamma_coeff", "sign")}
        if self.case == "v1":
            out["beta"] = self.beta
        else:
            out["theta"] = self.theta
        out["solver"] = dict(sorted(self.solver.items()))
        if self.inject_fault:
            out["inject_fault"] = self.inject_fault
        return out


def _parse_sign(value):
    if value in (1, "+", "+1", "plus"):
        return 1
    if value in (-1, "-", "-1", "minus"):
        return -1
    raise UsageError(f"sign must be + or -, got {value!r}")


# -- output -----------------------------------------------------------------

def _header(cfg, extra=None):
    meta = {"artifact": "artifact", "version": __version__, "config": cfg.resolved()}
    try:
        meta["params"] = cfg.params().as_dict()
    except InvalidParameters:
        pass
    if extra:
        meta.update(extra)
    return meta


def write_json(path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n", encoding="utf-8")


def write_csv(path, meta, columns, rows):
    """CSV with '#'-prefixed metadata lines, a header row and repr-precision floats."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _window(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be LO,HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError("window needs LO < HI")
    return lo, hi


# -- commands ---------------------------------------------------------------

def cmd_bands(cfg, out, k=1, window=(-0.5, 0.5), n_samples=2001):
    params = cfg.params()
    lam = np.linspace(window[0], window[1], n_samples)
    # sample exactly at 0 and at the case boundary of the closed form when inside the window
    extra = [0.0, mode_closed_form_args(params, k)[0]]
    lam = np.unique(np.concatenate((lam, [v for v in extra if window[0] <= v <= window[1]])))
    vals = np.atleast_1d(discriminant_mode(params, k, lam))
    report = band_report(params, k, window, n_samples)
    meta = _header(cfg, {"k": k, "window": list(window), "gap_radius": report.gap_radius,
                         "edges": report.edges})
    path = out / f"bands_k{k}.csv"
    write_csv(path, meta, ["k", "lambda", "D"], ((k, float(x), float(d)) for x, d in zip(lam, vals)))
    return EXIT_OK, path


def cmd_gap_check(cfg, out, k_max=41):
    params = cfg.params()
    cert = certify_gap_growth(params, k_max)
    payload = _header(cfg, {
        "k_max": k_max, "fitted_c": cert.fitted_c, "gamma": cert.gamma, "valid": cert.valid,
        "radii": [{"k": k, "gap_radius": r} for k, r in zip(cert.k_list, cert.radii)],
    })
    path = out / "gap_certificate.json"
    write_json(path, payload)
    return (EXIT_OK if cert.valid else EXIT_FAIL), path


def cmd_rayleigh(cfg, out, k_max=11):
    params = cfg.params()
    sc = cfg.solver_config()
    grid = Grid.for_params(params, sc.periods, sc.nodes)
    rows, eig_rows = [], []
    for k in range(1, k_max + 1, 2):
        basis = mode_basis(params, k, grid)
        eig_rows.extend((k, j, lam) for j, lam in enumerate(basis.eigenvalues))
        lam_min = float(np.min(np.abs(basis.eigenvalues)))
        ratio = h1_ratio(basis, grid)
        r = gap_radius(params, k)
        rows.append((k, lam_min, r, ratio, lam_min / k**params.gamma, ratio / k**params.delta))
    path = out / "rayleigh.csv"
    write_csv(path, _header(cfg, {"k_max": k_max}),
              ["k", "min_abs_eig", "gap_radius", "min_h1_ratio", "l2_scaled", "h1_scaled"], rows)
    write_csv(out / "eigenvalues.csv", _header(cfg, {"k_max": k_max}), ["k", "j", "lambda_j"], eig_rows)
    return EXIT_OK, path


def cmd_breather(cfg, out):
    params = cfg.params()
    sc = cfg.solver_config()
    nl = cfg.nonlinearity()
    sc.validate(params, nl)
    grid, bases = mode_bases(params, sc.k_max, Grid.for_params(params, sc.periods, sc.nodes))
    state, report = outer_minimize(sc, params, bases, nl, grid)
    meta = _header(cfg, {"n_t": sc.time_points(nl.p), "periods_used": grid.periods_each_side})
    write_json(out / "breather_report.json", dict(meta, report=report.as_dict()))
    write_csv(out / "breather_modes.csv", meta, ["k", "x", "re_u", "im_u"], state_rows(state))
    field_ = synthesize(state, sc.time_points(nl.p))
    amp = np.max(np.abs(field_.values), axis=0)
    write_csv(out / "breather_envelope.csv", meta, ["x", "a"], zip(grid.interior, amp))
    t = field_.times
    rows = ((float(x), float(tt), float(u)) for tt, row in zip(t, field_.values)
            for x, u in zip(grid.interior, row))
    write_csv(out / "breather_field.csv", meta, ["x", "t", "u"], rows)
    return (EXIT_OK if report.converged else EXIT_FAIL), out / "breather_report.json"


def cmd_verify(cfg, out):
    cfg.params()
    results = run_all(cfg.seed, cfg.inject_fault or None)
    ok = all(r.passed for r in results)
    payload = _header(cfg, {"passed": ok, "suites": [r.as_dict() for r in results]})
    path = out / "verify_report.json"
    write_json(path, payload)
    for r in results:
        print(f"{r.name:18s} {'PASS' if r.passed else 'FAIL'}  cases={r.cases} worst={r.worst:.3e}")
    return (EXIT_OK if ok else EXIT_FAIL), path


# -- entry point ------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="breather-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration")
    common.add_argument("--out", type=Path, help="output directory (default: config 'out')")
    common.add_argument("--seed", type=int, help="override the configured seed")
    p = sub.add_parser("bands", parents=[common], help="sample D_k on a window")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--window", type=_window, default=(-0.5, 0.5))
    p = sub.add_parser("gap-check", parents=[common], help="certify gap growth up to k_max")
    p.add_argument("--k-max", type=int, default=41)
    p = sub.add_parser("rayleigh", parents=[common], help="discrete Rayleigh bounds per mode")
    p.add_argument("--k-max", type=int, default=11)
    sub.add_parser("breather", parents=[common], help="compute a ground state breather")
    sub.add_parser("verify", parents=[common], help="run the property suites")
    return parser


def _thread_limit():
    value = os.environ.get("BREATHER_LAB_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise UsageError(f"BREATHER_LAB_THREADS must be an integer, got {value!r}") from None
    return threadpool_limits(limits=max(1, n))


def _dispatch(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    out = args.out if args.out is not None else Path(cfg.out)
    for name in ("k", "k_max"):
        val = getattr(args, name, None)
        if val is not None and (val < 1 or val % 2 == 0):
            raise UsageError(f"--{name.replace('_', '-')} must be a positive odd integer")
    if args.command == "bands":
        return cmd_bands(cfg, out, args.k, args.window)
    if args.command == "gap-check":
        return cmd_gap_check(cfg, out, args.k_max)
    if args.command == "rayleigh":
        return cmd_rayleigh(cfg, out, args.k_max)
    if args.command == "breather":
        return cmd_breather(cfg, out)
    return cmd_verify(cfg, out)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        with _thread_limit():
            code, path = _dispatch(args)
    except (UsageError, FileNotFoundError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # InvalidParameters and malformed solver settings
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    print(f"wrote {path}")
    return code


if __name__ == "__main__":
    sys.exit(main())
