"""Command-line front end.

    mfshift info --n 3
    mfshift verify --n 3 --shift nilpotent --samples 20 --seed 7 --json report.json
    mfshift codim --n 4 --shift diag --diag 3,1,-1,-3
    mfshift selfcheck

Exit codes: 0 verified, 1 assertion failure or inconclusive, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .argshift import CLASSICAL_ORDER_SL3, label_permutation, new_shift_system
from .bifurcation import CODIM_ONE, CODIM_TWO, _cplx, certify_codim, make_shift, verify_theorem
from .errors import MFShiftError
from .liealg import algebra
from .numkernel import RANK_TOL
from .selfcheck import run_selfcheck

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
CERTIFIED_N = (2, 3, 4)


class InvalidConfig(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int
    shift: str
    diag: list | None
    samples: int
    seed: int
    tol: float
    threads: int
    json_path: str | None = None
    timing: bool = True

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("json_path")
        d.pop("timing")
        return d


def _parse_diag(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidConfig(f"cannot parse --diag {text!r}") from exc


def build_config(args) -> RunConfig:
    if args.n < 2:
        raise InvalidConfig(f"n must be >= 2, got {args.n}")
    if args.command in ("verify", "codim") and args.n not in CERTIFIED_N:
        raise InvalidConfig(f"n = {args.n} is outside the certified range {CERTIFIED_N}")
    if args.samples < 1:
        raise InvalidConfig("--samples must be >= 1")
    if not 0 < args.tol < 1:
        raise InvalidConfig("--tol must lie in (0, 1)")
    if not 0 <= args.seed < 2**64:
        raise InvalidConfig("--seed must be a 64-bit unsigned integer")
    if args.threads < 1:
        raise InvalidConfig("--threads must be >= 1")
    shift = args.shift
    diag = None
    if args.diag is not None:
        if shift not in (None, "diag"):
            raise InvalidConfig("--diag only combines with --shift diag")
        shift = "diag"
        diag = _parse_diag(args.diag)
    if shift is None:
        shift = "generic"
    if shift == "diag":
        if diag is None:
            raise InvalidConfig("--shift diag needs --diag d1,...,dn")
        if len(diag) != args.n:
            raise InvalidConfig(f"--diag needs {args.n} entries, got {len(diag)}")
        if not np.all(np.isfinite(diag)):
            raise InvalidConfig("--diag entries must be finite")
    return RunConfig(args.command, args.n, shift, diag, args.samples, args.seed, args.tol,
                     args.threads, args.json, not args.no_timing)


def _shift_spec(cfg: RunConfig):
    return cfg.diag if cfg.shift == "diag" else cfg.shift


def _emit(cfg: RunConfig, report: dict, started: float):
    report["timing_ms"] = round((time.perf_counter() - started) * 1000.0, 3) if cfg.timing else None
    report["version"] = __version__
    if cfg.json_path:
        text = json.dumps(report, indent=2) + "\n"
        if cfg.json_path == "-":
            sys.stdout.write(text)
        else:
            with open(cfg.json_path, "w", encoding="utf-8") as fh:
                fh.write(text)


def _say(cfg: RunConfig, line: str = ""):
    # stdout is reserved for JSON when --json - is given
    print(line, file=sys.stderr if cfg.json_path == "-" else sys.stdout)


def cmd_info(cfg: RunConfig) -> int:
    alg = algebra(cfg.n)
    sys_ = new_shift_system(make_shift(cfg.n, "generic"))
    _say(cfg, f"sl_{cfg.n}: dim {alg.dim}, rank {alg.rank}, b {alg.b}, u {alg.u}, "
              f"degrees {tuple(alg.degrees)}")
    _say(cfg, "generators (i, j): " + " ".join(f"({i},{j})" for i, j in sys_.labels))
    report = {"config": cfg.echo(), "algebra": alg.as_dict(),
              "labels": [list(l) for l in sys_.labels]}
    if cfg.n == 3:
        perm = label_permutation(sys_, CLASSICAL_ORDER_SL3)
        _say(cfg, "classical sl_3 tuple order -> label indices: " + str(perm))
        report["classical_sl3_permutation"] = perm
    _emit(cfg, report, time.perf_counter())
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    rep = verify_theorem(cfg.n, _shift_spec(cfg), cfg.samples, rng, cfg.tol, cfg.threads)
    report = {
        "config": cfg.echo(),
        "algebra": rep["algebra"],
        "shift": rep["shift"],
        "assertions": rep["assertions"],
        "certificate": rep["certificate"],
        "verdict": rep["verdict"],
        "all_passed": rep["all_passed"],
    }
    for a in rep["assertions"]:
        mark = {True: "PASS", False: "FAIL", None: "INFO"}[a["pass"]]
        _say(cfg, f"[{mark}] {a['name']}: measured {json.dumps(a['measured'])}, "
                  f"expected {json.dumps(a['expected'])}")
    _say(cfg, f"verdict: {rep['verdict']} ({rep['certificate']['verdict']})")
    _emit(cfg, report, started)
    return EXIT_OK if rep["all_passed"] else EXIT_FAIL


def cmd_codim(cfg: RunConfig) -> int:
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    sys_ = new_shift_system(make_shift(cfg.n, _shift_spec(cfg)))
    cert = certify_codim(sys_, cfg.samples, rng, cfg.tol, cfg.threads)
    report = {
        "config": cfg.echo(),
        "algebra": sys_.algebra.as_dict(),
        "shift": {"kind": sys_.kind, "matrix": [[_cplx(v) for v in row] for row in sys_.a]},
        "certificate": cert.as_dict(),
    }
    _say(cfg, f"max restricted rank {cert.max_restricted_rank} of b-1 = {cert.b - 1} "
              f"over {cert.samples_used} samples")
    _say(cfg, f"verdict: {cert.verdict}")
    _emit(cfg, report, started)
    return EXIT_OK if cert.verdict in (CODIM_ONE, CODIM_TWO) else EXIT_FAIL


def cmd_selfcheck(cfg: RunConfig) -> int:
    started = time.perf_counter()
    checks = run_selfcheck(cfg.seed, cfg.tol)
    for c in checks:
        line = f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.measured:.3e} ({c.threshold})"
        if c.detail:
            line += f" -- {c.detail}"
        _say(cfg, line)
    _emit(cfg, {"config": cfg.echo(), "checks": [c.as_dict() for c in checks]}, started)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


COMMANDS = {"info": cmd_info, "verify": cmd_verify, "codim": cmd_codim, "selfcheck": cmd_selfcheck}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="matrix size of sl_n (default 3)")
    common.add_argument("--shift", choices=["nilpotent", "generic", "diag"], default=None,
                        help="shift element: xi, xi + generic diagonal, or xi + diag(--diag)")
    common.add_argument("--diag", default=None, help="comma-separated diagonal d1,...,dn")
    common.add_argument("--samples", type=int, default=20, help="sample budget")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (64-bit unsigned)")
    common.add_argument("--tol", type=float, default=RANK_TOL, help="relative rank cutoff")
    common.add_argument("--json", default=None, metavar="PATH",
                        help="write the JSON report to PATH ('-' for stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sampling")
    common.add_argument("--no-timing", action="store_true",
                        help="write timing_ms as null so reports are byte-reproducible")
    p = argparse.ArgumentParser(prog="mfshift", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common], help="algebra data and generator labels")
    sub.add_parser("verify", parents=[common], help="run the full rank verification suite")
    sub.add_parser("codim", parents=[common], help="codimension certificate only")
    sub.add_parser("selfcheck", parents=[common], help="numerical oracle suite")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except InvalidConfig as exc:
        print(f"mfshift: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[cfg.command](cfg)
    except MFShiftError as exc:
        print(f"mfshift: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
