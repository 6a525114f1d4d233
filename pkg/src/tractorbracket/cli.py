"""Command line front end: ``grade``, ``classify`` and ``verify``.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .algebra import DimensionError, UnsupportedAlgebraError, build_algebra
from .chartcalc import PolyForm, ValuedForm
from .coisotropy import DEFAULT_ROOT_CAP, SweepCapExceeded, counterexamples, sweep_root_subalgebras
from .courant import (
    JACOBIATOR_SIGN,
    check_axioms,
    check_compatibility,
    check_jacobi,
    h4_form,
    make_context,
    pontrjagin_form,
    random_samples,
    unobstructed_h,
    with_data,
)
from .grading import GradingError, all_sigmas, grade, verify_duality, verify_grading
from .literals import LiteralParseError, parse_form

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    rank: int | None = None
    sigma: tuple[int, ...] | None = None
    config_path: Path | None = None
    output_format: str = "json"
    seed: int | None = None
    samples: int | None = None
    max_poly_degree: int | None = None
    cap: int = DEFAULT_ROOT_CAP
    timings: bool = False

    def validate(self) -> None:
        if self.command in ("grade", "classify"):
            if self.family is None or self.rank is None:
                raise UsageError(f"{self.command} requires --family and --rank")
        if self.command == "verify" and self.config_path is None:
            raise UsageError("verify requires --config")
        for name in ("samples", "max_poly_degree", "cap"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")


def _algebra(family: str, rank: int):
    try:
        return build_algebra(family, rank)
    except UnsupportedAlgebraError as exc:
        raise UsageError(str(exc)) from None


def _elem(coords) -> list[str]:
    return [str(c) for c in coords]


def cmd_grade(cfg: RunConfig) -> dict:
    a = _algebra(cfg.family, cfg.rank)
    sigmas = [cfg.sigma] if cfg.sigma else all_sigmas(a.rank)
    rows = []
    for sigma in sigmas:
        try:
            gd = grade(a, sigma)
        except GradingError as exc:
            raise UsageError(str(exc)) from None
        g_rep = verify_grading(a, gd)
        d_rep = verify_duality(a, gd)
        rows.append({
            "sigma": sorted(gd.sigma),
            "k": gd.k,
            "dims": list(gd.dims()),
            "grading_element": _elem(gd.grading_element.coords[i] for i in a.cartan_indices),
            "grading": g_rep.to_dict(),
            "duality": d_rep.to_dict(),
            "passed": g_rep.passed and d_rep.passed,
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "grade",
        "algebra": {"family": a.family, "rank": a.rank, "dimension": a.dimension},
        "rows": rows,
        "passed": all(r["passed"] for r in rows),
    }


def cmd_classify(cfg: RunConfig) -> dict:
    a = _algebra(cfg.family, cfg.rank)
    entries = sweep_root_subalgebras(a, cap=cfg.cap)
    bad = counterexamples(entries)
    n_roots = len(a.root_space_index)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "algebra": {"family": a.family, "rank": a.rank, "dimension": a.dimension},
        "roots": n_roots,
        "subsets_enumerated": 2 ** n_roots,
        "counts": {
            "closed": len(entries),
            "subalgebra": sum(e.is_subalgebra for e in entries),
            "coisotropic": sum(e.is_coisotropic for e in entries),
            "parabolic": sum(e.is_parabolic for e in entries),
        },
        "counterexamples": [
            {
                "roots": [list(r) for r in sorted(e.descriptor.root_subset)],
                "coisotropic": e.is_coisotropic,
                "parabolic": e.is_parabolic,
                "subalgebra": e.is_subalgebra,
            }
            for e in bad
        ],
        "passed": not bad,
    }


def load_context_config(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc: dict, key: str, path: str, kind=None, default: Any = ...):
    if key not in doc:
        if default is ...:
            raise UsageError(f"config field {path}{key} is required")
        return default
    v = doc[key]
    if kind is not None and not isinstance(v, kind):
        raise UsageError(f"config field {path}{key} has wrong type {type(v).__name__}")
    return v


def context_from_config(doc: dict):
    """Build a CourantContext from the JSON config document."""
    alg = _field(doc, "algebra", "", dict)
    a = _algebra(_field(alg, "family", "algebra.", str), _field(alg, "rank", "algebra.", int))
    sigma = _field(doc, "sigma", "", list)
    try:
        gd = grade(a, sigma)
    except (GradingError, TypeError, ValueError) as exc:
        raise UsageError(f"config field sigma: {exc}") from None
    ctx = make_context(a, gd)
    n, m = ctx.n, ctx.m

    comps = [PolyForm.zero(n, 1) for _ in range(m)]
    for k, entry in enumerate(_field(doc, "connection", "", list, [])):
        where = f"connection[{k}]."
        if not isinstance(entry, dict):
            raise UsageError(f"config field connection[{k}] must be an object")
        idx = _field(entry, "value_index", where, int)
        if not 0 <= idx < m:
            raise UsageError(f"config field {where}value_index = {idx} outside 0..{m - 1} (dim g_0 = {m})")
        text = _field(entry, "form", where, str)
        try:
            w = parse_form(text, n, degree=1)
        except LiteralParseError as exc:
            raise UsageError(f"config field {where}form: {exc}") from None
        comps[idx] = comps[idx] + w
    try:
        ctx = with_data(ctx, A=ValuedForm(n, 1, comps))
    except DimensionError as exc:
        raise UsageError(f"config field connection: {exc}") from None

    h_text = _field(doc, "h_form", "", str, "0")
    if h_text.strip() == "unobstructed":
        H = unobstructed_h(ctx)
    else:
        try:
            H = parse_form(h_text, n, degree=3)
        except LiteralParseError as exc:
            raise UsageError(f"config field h_form: {exc}") from None
    return with_data(ctx, H=H)


def cmd_verify(cfg: RunConfig) -> dict:
    doc = load_context_config(cfg.config_path)
    ctx = context_from_config(doc)
    seed = cfg.seed if cfg.seed is not None else _field(doc, "seed", "", int, 0)
    count = cfg.samples if cfg.samples is not None else _field(doc, "samples", "", int, 20)
    degree = cfg.max_poly_degree if cfg.max_poly_degree is not None else _field(doc, "max_poly_degree", "", int, 2)
    if count < 0 or degree < 0:
        raise UsageError("samples and max_poly_degree must be nonnegative")

    timings = {}
    t0 = time.perf_counter()
    samples = random_samples(ctx, count, seed=seed, max_degree=degree)
    axioms = check_axioms(ctx, samples)
    timings["axioms"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    compat = check_compatibility(ctx, samples=max(1, min(count, 10)), seed=seed, max_degree=min(degree, 2))
    timings["compatibility"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pont = pontrjagin_form(ctx)
    h4 = h4_form(ctx)
    jac = check_jacobi(ctx, samples[: min(count, 10)])
    timings["jacobi"] = time.perf_counter() - t0

    status = "twisted" if h4 else "satisfied"
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "context": {
            "algebra": {"family": ctx.algebra.family, "rank": ctx.algebra.rank},
            "sigma": sorted(ctx.gd.sigma),
            "chart_dim": ctx.n,
            "fibre_dim": ctx.m,
            "connection": [str(c) for c in ctx.connection_A.components],
            "h_form": str(ctx.h_form),
        },
        "seed": seed,
        "samples": count,
        "max_poly_degree": degree,
        "axioms": axioms.to_dict(),
        "compatibility": compat.to_dict(),
        "pontrjagin": {"form": str(pont), "closed": True},
        "h4": str(h4),
        "jacobi": {"status": status, "sign": JACOBIATOR_SIGN, **jac.to_dict()},
        "passed": axioms.passed and compat.passed and jac.passed,
    }
    if cfg.timings:
        report["timings"] = {k: round(v, 6) for k, v in timings.items()}
    return report


COMMANDS = {"grade": cmd_grade, "classify": cmd_classify, "verify": cmd_verify}


def _parse_sigma(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid sigma {text!r}; expected a comma list of integers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tractorbracket", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("json", "text"), default="json")
    common.add_argument("--family")
    common.add_argument("--rank", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)

    p = sub.add_parser("grade", parents=[common], help="|k|-gradings and Killing dualities")
    p.add_argument("--sigma", type=_parse_sigma)
    p = sub.add_parser("classify", parents=[common], help="coisotropic vs parabolic sweep")
    p.add_argument("--cap", type=int, default=DEFAULT_ROOT_CAP)
    p = sub.add_parser("verify", parents=[common], help="pre-Courant verification from a config file")
    p.add_argument("--config", dest="config_path", type=Path)
    p.add_argument("--max-poly-degree", dest="max_poly_degree", type=int)
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (not deterministic)")
    return parser


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {'PASS' if report.get('passed') else 'FAIL'}"]
    if report["command"] == "grade":
        for r in report["rows"]:
            lines.append(
                f"  sigma={r['sigma']} k={r['k']} dims={'/'.join(map(str, r['dims']))} "
                f"K={r['grading_element']} {'pass' if r['passed'] else 'FAIL'}"
            )
    elif report["command"] == "classify":
        c = report["counts"]
        lines.append(f"  roots={report['roots']} closed={c['closed']} coisotropic={c['coisotropic']} "
                     f"parabolic={c['parabolic']} counterexamples={len(report['counterexamples'])}")
    elif report["command"] == "verify":
        ctx = report["context"]
        lines.append(f"  {ctx['algebra']['family']}{ctx['algebra']['rank']} sigma={ctx['sigma']} "
                     f"n={ctx['chart_dim']} dim E={ctx['fibre_dim']} seed={report['seed']}")
        for section in ("axioms", "compatibility", "jacobi"):
            for chk in report[section]["checks"]:
                lines.append(f"  [{'pass' if chk['passed'] else 'FAIL'}] {section}.{chk['name']}")
        lines.append(f"  jacobi status: {report['jacobi']['status']}; H4 = {report['h4']}")
    elif "error" in report:
        lines.append(f"  error: {report['error']}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})
    try:
        cfg.validate()
        report = COMMANDS[cfg.command](cfg)
    except SweepCapExceeded as exc:
        report = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "error": str(exc),
                  "cap": exc.cap, "roots": exc.n_roots, "passed": False}
        _emit(report, cfg.output_format)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, cfg.output_format)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _emit(report: dict, fmt: str) -> None:
    if fmt == "text":
        print(render_text(report))
    else:
        print(json.dumps(report, indent=2))


if __name__ == "__main__":
    sys.exit(main())
