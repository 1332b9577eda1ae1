"""Command-line front end.

Subcommands::

    simulate      dump a sampled sheet and a process path Y_h as CSV
    integrate     closed-form Feynman integral plus a Monte Carlo estimate at real lambda
    fubini        iterated-integral checks (default kernels: H4)
    transform     transform composition checks (default kernels: trig-pair)
    convolution   transform/convolution relationships (default kernels: k1k2-pair)
    suite         every check group

Configuration comes from a JSON file (``--config``); flags override it. The
default seed may also be set through ``YEHFEYNMAN_SEED``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .algebra import random_functional
from .checks import CHECKS, LANE_FUNCTIONALS, SuiteContext, run_checks
from .feynman import closed_form_real_lambda, feynman_closed_form, yeh_wiener_mc
from .formats import emit_convergence_csv, functional_from_dict, load_functional, write_path_csv, write_reports
from .grid import combine_kernels, make_grid
from .kernels import PRESETS, resolve_kernels
from .sheet import RngStream, gaussian_path, sample_sheet

SEED_ENV = "YEHFEYNMAN_SEED"

GROUPS = {
    "fubini": (("fubini", "two_stage_fubini"), "H4"),
    "transform": (("transform_inverse", "transform_q", "transform_kernel", "transform_mixed"), "trig-pair"),
    "convolution": (
        ("relationship_I", "relationship_I_extended", "relationship_II",
         "relationship_II_extended", "relationship_II_dual"),
        "k1k2-pair",
    ),
    "integrate": (("mc_consistency",), "H4"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    grid: dict = field(default_factory=lambda: {"S": 1.0, "T": 1.0, "ns": 64, "nt": 64})
    seed: int = 0
    n_samples: int = 10_000
    q: float = 1.0
    lam: float = 1.0
    kernels: list | None = None
    functionals: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    report: str | None = None
    csv: str | None = None
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    n_y: int = 10

    def validate(self) -> None:
        if self.q == 0:
            raise ConfigError("q must be nonzero")
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        if self.n_samples < 2:
            raise ConfigError("need at least 2 samples")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for name in self.checks:
            if name not in CHECKS:
                raise ConfigError(f"unknown check {name!r}; known: {', '.join(sorted(CHECKS))}")
        for k in self.kernels or []:
            if k not in PRESETS:
                try:
                    resolve_kernels([k], make_grid(1, 1, 1, 1))
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
        try:
            make_grid(**self.grid)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad grid: {exc}") from None

    def echo(self) -> dict:
        """Configuration echoed into reports; excludes settings that cannot affect results."""
        d = asdict(self)
        for key in ("workers", "report", "csv"):
            d.pop(key)
        return d


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        ns, nt = text.lower().split("x")
        return int(ns), int(nt)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}") from None


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if os.environ.get(SEED_ENV):
        cfg.seed = int(os.environ[SEED_ENV])
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        doc = dict(doc)
        if "lambda" in doc:
            doc["lam"] = doc.pop("lambda")
        out = doc.pop("output", {}) or {}
        doc.setdefault("report", out.get("report"))
        doc.setdefault("csv", out.get("csv"))
        unknown = set(doc) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        grid = {**cfg.grid, **doc.pop("grid", {})}
        cfg = RunConfig(**{**asdict(cfg), **doc, "grid": grid})
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        cfg.n_samples = args.samples
    if args.grid is not None:
        cfg.grid = {**cfg.grid, "ns": args.grid[0], "nt": args.grid[1]}
    if args.q is not None:
        cfg.q = args.q
    if args.lam is not None:
        cfg.lam = args.lam
    if args.check:
        cfg.checks = list(args.check)
    if args.kernels:
        cfg.kernels = list(args.kernels)
    if args.csv is not None:
        cfg.csv = args.csv
    if args.report is not None:
        cfg.report = args.report
    if args.workers is not None:
        cfg.workers = args.workers
    cfg.validate()
    return cfg


def _functionals(cfg: RunConfig, grid, rng: RngStream):
    gen = rng.child(LANE_FUNCTIONALS).generator(0)
    out = []
    for spec in cfg.functionals[:2]:
        out.append(load_functional(spec, grid) if isinstance(spec, str) else functional_from_dict(spec, grid))
    while len(out) < 2:
        out.append(random_functional(grid, gen, n_atoms=3))
    return out


def _context(cfg: RunConfig, default_kernels: str) -> SuiteContext:
    grid = make_grid(**cfg.grid)
    rng = RngStream(cfg.seed)
    F, G = _functionals(cfg, grid, rng)
    kernels = resolve_kernels(cfg.kernels or [default_kernels], grid)
    return SuiteContext(grid, F, G, kernels, cfg.q, cfg.lam, cfg.n_samples, rng, cfg.n_y, cfg.workers)


def run_suite(cfg: RunConfig, groups=None):
    """Run the configured checks; returns ``(exit_status, reports)``."""
    groups = list(groups or GROUPS)
    reports = []
    for group in groups:
        names, default_kernels = GROUPS[group]
        selected = [n for n in names if not cfg.checks or n in cfg.checks]
        if selected:
            reports.extend(run_checks(selected, _context(cfg, default_kernels)))
    if cfg.report:
        write_reports(reports, cfg.report, cfg.echo())
    return (0 if reports and all(r.passed for r in reports) else 1), reports


def _cmd_simulate(cfg: RunConfig) -> int:
    grid = make_grid(**cfg.grid)
    rng = RngStream(cfg.seed)
    x = sample_sheet(grid, rng)
    h = combine_kernels(resolve_kernels(cfg.kernels or ["one"], grid))
    y = gaussian_path(h, x)
    if cfg.csv:
        write_path_csv(x, cfg.csv)
        stem = Path(cfg.csv)
        write_path_csv(y, stem.with_name(stem.stem + "_process" + stem.suffix))
    print(json.dumps({"x(S,T)": float(x.node_values()[-1, -1]), "Y_h(S,T)": float(y.node_values()[-1, -1])}))
    return 0


def _cmd_integrate(cfg: RunConfig) -> int:
    ctx = _context(cfg, "one")
    h = combine_kernels(ctx.kernels)
    est = yeh_wiener_mc(ctx.F, h, cfg.lam, cfg.n_samples, ctx.rng, cfg.workers)
    record = {
        "feynman_q": cfg.q,
        "feynman": [feynman_closed_form(ctx.F, h, cfg.q).real, feynman_closed_form(ctx.F, h, cfg.q).imag],
        "lambda": cfg.lam,
        "closed_form_lambda": [closed_form_real_lambda(ctx.F, h, cfg.lam).real,
                               closed_form_real_lambda(ctx.F, h, cfg.lam).imag],
        "mc": est.to_record(),
    }
    if cfg.csv:
        emit_convergence_csv(ctx.F, h, cfg.lam, cfg.n_samples, ctx.rng, cfg.csv, cfg.workers)
    print(json.dumps(record, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--grid", type=_parse_grid, metavar="NSxNT")
    common.add_argument("--q", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--check", action="append", metavar="NAME")
    common.add_argument("--kernels", action="append", metavar="PRESET|EXPR")
    common.add_argument("--csv", metavar="PATH")
    common.add_argument("--report", metavar="PATH")
    common.add_argument("--workers", type=int, default=None)

    parser = argparse.ArgumentParser(prog="yehfeynman", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "integrate", "fubini", "transform", "convolution", "suite"):
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, OSError, json.JSONDecodeError, TypeError) as exc:
        parser.error(str(exc))
    if args.command == "simulate":
        return _cmd_simulate(cfg)
    if args.command == "integrate":
        return _cmd_integrate(cfg)
    groups = None if args.command == "suite" else [args.command]
    status, reports = run_suite(cfg, groups)
    for r in reports:
        print(r.summary() if not r.error else f"{r.summary()} {r.error}")
    print("OK" if status == 0 else "FAILED")
    return status


if __name__ == "__main__":
    sys.exit(main())
