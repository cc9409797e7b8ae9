"""Command-line front end: verification suites, the Bethe solver and the cohomology reports.

Reports go out as one JSON object per line followed by a summary line.
Exit codes: 0 all checks pass, 1 some check fails, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import bethe, cohomology, reflection, susy
from .reports import CheckReport, dumps, summarize

SUITES = ("susy", "reflection", "theorem1", "deltas", "transfer", "pairing", "all")
FEASIBLE_N = 12


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    n_range: tuple[int, int] = (2, 4)
    samples: int = 3
    seed: int = 0
    tol: dict = field(default_factory=dict)
    output_path: str | None = None

    def __post_init__(self):
        lo, hi = self.n_range
        if lo > hi:
            raise UsageError(f"empty n range {lo}..{hi}")
        if lo < 1:
            raise UsageError("n must be >= 1")
        if self.samples < 1:
            raise UsageError("samples must be >= 1")

    @property
    def ns(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)


def parse_range(text) -> tuple[int, int]:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return int(text[0]), int(text[1])
    if isinstance(text, int):
        return text, text
    try:
        if ".." in str(text):
            lo, hi = str(text).split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise UsageError(f"bad n range {text!r}; use N or LO..HI") from None


def parse_tol(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"bad --tol {item!r}; use check_name=value")
        try:
            out[name] = float(val)
        except ValueError:
            raise UsageError(f"bad tolerance value in {item!r}") from None
    return out


# ----------------------------------------------------------------------------
# task execution

Task = Callable[[], list[CheckReport]]


def _threads() -> int:
    raw = os.environ.get("SUSYX_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"SUSYX_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def run_tasks(tasks: Sequence[Task]) -> list[CheckReport]:
    """Run tasks in parallel; results keep task order so output is stable."""
    workers = min(_threads(), max(1, len(tasks)))
    if workers == 1:
        results = [t() for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: t(), tasks))
    return [r for chunk in results for r in chunk]


def apply_tol_overrides(reports: list[CheckReport], tol: dict) -> list[CheckReport]:
    out = []
    for r in reports:
        if r.check_name in tol:
            r = CheckReport.make(r.check_name, r.params, r.residual, tol[r.check_name])
        out.append(r)
    return out


def emit(reports: list[CheckReport], cfg: RunConfig, stream=None) -> int:
    reports = apply_tol_overrides(reports, cfg.tol)
    lines = [r.to_json() for r in reports] + [dumps(summarize(reports))]
    text = "\n".join(lines) + "\n"
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        (stream or sys.stdout).write(text)
    return 0 if all(r.passed for r in reports) else 1


# ----------------------------------------------------------------------------
# suites


def _samples(cfg: RunConfig, suite: str, n: int) -> list[complex]:
    seed_seq = np.random.SeedSequence([cfg.seed, SUITES.index(suite), n])
    return reflection.sample_spectral(np.random.default_rng(seed_seq), cfg.samples)


def _need_n2(suite: str, cfg: RunConfig, strict: bool) -> list[int]:
    if cfg.n_range[0] < 2 and strict:
        raise UsageError(f"suite {suite!r} needs n >= 2")
    return [n for n in cfg.ns if n >= 2]


def _weights_report(u: complex) -> CheckReport:
    return CheckReport.make("weights.identities", {"u": u}, max(reflection.weights(u).identity_residuals()), 1e-12)


def suite_tasks(suite: str, cfg: RunConfig, strict: bool = True) -> list[Task]:
    tasks: list[Task] = []
    if suite == "susy":
        for n in _need_n2(suite, cfg, strict):
            tasks.append(lambda n=n: susy.check_susy_suite(n))
    elif suite == "reflection":
        for n in cfg.ns:
            for u in _samples(cfg, suite, n):
                tasks.append(lambda n=n, u=u: [_weights_report(u), reflection.construction_check(n, u)])
    elif suite == "theorem1":
        for n in _need_n2(suite, cfg, strict):
            for u in _samples(cfg, suite, n):
                tasks.append(lambda n=n, u=u: reflection.theorem1_residuals(n, u))
    elif suite == "deltas":
        for n in cfg.ns:
            for u in _samples(cfg, suite, n):
                tasks.append(lambda n=n, u=u: [reflection.pseudovacuum_deltas(n, u)[2]])
    elif suite == "transfer":
        for n in cfg.ns:
            us = _samples(cfg, suite, n)
            tasks.append(lambda n=n: [reflection.transfer_at_zero_check(n)])
            if n >= 2:
                tasks.append(lambda n=n: [reflection.transfer_derivative_check(n)])
            for i, u in enumerate(us):
                v = us[(i + 1) % len(us)] + 0.1j
                checks = lambda n=n, u=u, v=v: [
                    reflection.transfer_commutation_check(n, u, v),
                    reflection.transfer_hamiltonian_check(n, u),
                ] + ([reflection.transfer_intertwining_check(n, u)] if n >= 2 else [])
                tasks.append(checks)
    elif suite == "pairing":
        for n in _need_n2(suite, cfg, strict):
            tasks.append(lambda n=n: [bethe.q_omega_identity(n)])
            for i in range(cfg.samples):
                tasks.append(lambda n=n, i=i: _offshell_pairing(cfg.seed, n, i))
    elif suite == "all":
        for name in SUITES[:-1]:
            tasks.extend(suite_tasks(name, cfg, strict=False))
    else:
        raise UsageError(f"unknown suite {suite!r}")
    return tasks


def _offshell_pairing(seed: int, n: int, index: int) -> list[CheckReport]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 99, n, index]))
    out = []
    for m in range(1, min(3, n) + 1):
        rs = bethe.random_root_set(rng, n, m)
        res, _, _ = bethe.keyrelation_residual(n, rs.roots)
        params = {"n": n, "m": m, "roots": list(rs.roots), "seed": seed, "sample": index}
        out.append(CheckReport.make("pairing.key_relation_offshell", params, res, bethe.KEY_TOL))
    return out


# ----------------------------------------------------------------------------
# commands


def cmd_verify(args, cfg: RunConfig) -> int:
    _warn_large(cfg)
    return emit(run_tasks(suite_tasks(args.suite, cfg)), cfg)


def _load_roots(path: str) -> list[bethe.BetheRootSet]:
    try:
        return bethe.read_root_sets(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except bethe.RootFileError as exc:
        raise UsageError(str(exc)) from None


def cmd_bethe(args, cfg: RunConfig) -> int:
    reports: list[CheckReport] = []
    if args.action == "solve":
        if args.m is None:
            raise UsageError("bethe solve needs --m")
        n = cfg.n_range[0]
        if cfg.n_range[0] != cfg.n_range[1]:
            raise UsageError("bethe solve takes a single --n")
        if not 1 <= args.m <= n:
            raise UsageError(f"need 1 <= m <= n, got m={args.m}, n={n}")
        if args.starts < 1:
            raise UsageError("--starts must be >= 1")
        result = bethe.solve_bethe(n, args.m, bethe.SolverConfig(starts=args.starts, seed=cfg.seed))
        extra = [{"regular": rs.regular, "mirror_group": g}
                 for rs, g in zip(result.root_sets, result.mirror_group)]
        path = args.roots or f"roots_n{n}_m{args.m}.json"
        bethe.write_root_sets(path, result.root_sets, extra)
        diag = result.diagnostic()
        params = dict(diag.params, roots_file=path)
        reports.append(CheckReport.make(diag.check_name, params, diag.residual, diag.tolerance))
        for rs in result.root_sets:
            reports.append(_residual_report(rs))
        return emit(reports, cfg)

    if not args.roots:
        raise UsageError(f"bethe {args.action} needs --roots FILE")
    sets = _load_roots(args.roots)
    for k, rs in enumerate(sets):
        if args.action == "check":
            res_report = _residual_report(rs)
            reports.append(res_report)
            if res_report.residual < bethe.ONSHELL_PRE_TOL:
                reports.append(bethe.onshell_check(rs.n, rs, cfg.samples, cfg.seed))
        else:
            if rs.n < 2:
                raise UsageError("bethe pair needs n >= 2")
            reports.extend(bethe.susy_pairing_check(rs.n, rs, cfg.samples, cfg.seed))
    return emit(reports, cfg)


def _residual_report(rs: bethe.BetheRootSet) -> CheckReport:
    res = bethe.bethe_residual(rs)
    worst = float(res.max()) if res.size else 0.0
    params = {"n": rs.n, "m": rs.m, "roots": list(rs.roots), "regular": rs.regular}
    return CheckReport.make("bethe.residual", params, worst, 1e-10)


def _warn_large(cfg: RunConfig) -> None:
    if cfg.n_range[1] > FEASIBLE_N:
        print(f"warning: n = {cfg.n_range[1]} is above {FEASIBLE_N}; dense work grows like 4^n",
              file=sys.stderr)


def cmd_vacuum(args, cfg: RunConfig) -> int:
    _warn_large(cfg)
    tasks = [lambda n=n: [cohomology.vacuum_singlet(n)[1]] for n in cfg.ns]
    return emit(run_tasks(tasks), cfg)


def cmd_spectrum(args, cfg: RunConfig) -> int:
    _warn_large(cfg)
    if cfg.n_range[0] < 2:
        raise UsageError("spectrum needs n >= 2")
    tasks = [lambda n=n: [cohomology.spectrum_decomposition(n).report(), cohomology.dims(n).report()]
             for n in cfg.ns]
    return emit(run_tasks(tasks), cfg)


# ----------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", help="chain length N or inclusive range LO..HI")
    common.add_argument("--samples", type=int, help="random spectral parameters per size")
    common.add_argument("--seed", type=int, help="RNG seed")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override the tolerance of a check")
    common.add_argument("--out", help="write reports to this file instead of stdout")
    common.add_argument("--config", help="JSON file with n_range, samples, seed, tol, output_path")

    parser = _Parser(prog="susyx", description="Lattice SUSY and Bethe ansatz verification for the open XXZ chain.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p = sub.add_parser("bethe", parents=[common], help="solve or check Bethe equations")
    p.add_argument("action", choices=("solve", "check", "pair"))
    p.add_argument("--m", type=int, help="number of roots (solve)")
    p.add_argument("--starts", type=int, default=200, help="random Newton starts (solve)")
    p.add_argument("--roots", help="root-set file (written by solve, read by check/pair)")
    sub.add_parser("vacuum", parents=[common], help="zero-energy singlet per size")
    sub.add_parser("spectrum", parents=[common], help="singlet/doublet counts per size")
    return parser


def make_config(args) -> RunConfig:
    base: dict = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(base, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(base) - {"n_range", "samples", "seed", "tol", "output_path"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig()
    if "n_range" in base:
        cfg = replace(cfg, n_range=parse_range(base["n_range"]))
    for key in ("samples", "seed", "output_path"):
        if key in base:
            cfg = replace(cfg, **{key: base[key]})
    tol = dict(base.get("tol", {}))
    if args.n is not None:
        cfg = replace(cfg, n_range=parse_range(args.n))
    if args.samples is not None:
        cfg = replace(cfg, samples=args.samples)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_path=args.out)
    tol.update(parse_tol(args.tol))
    return replace(cfg, tol=tol)


COMMANDS = {"verify": cmd_verify, "bethe": cmd_bethe, "vacuum": cmd_vacuum, "spectrum": cmd_spectrum}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = make_config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"susyx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
