"""Command-line front end.

Exit codes: 0 success, 1 domain failure (invalid spec, failed check,
obstruction when absence was required), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from ._rational import as_fraction
from .folding import (
    FoldingError,
    certify_plan,
    emit_map_spec,
    load_plan,
    plan_from_recipe,
    plan_to_text,
)
from .linear_model import (
    Itinerary,
    LinearModelError,
    classify,
    expansion_report,
    from_annular_rules,
    omega_limit_approx,
    refine,
    thue_morse,
)
from .multicurve import MulticurveError, analysis_report, kappa_table, multicurve, summary_line
from .render import intervals_csv, intervals_svg, kappa_csv, metric_csv, report_text, tree_dot, tree_svg
from .spec_model import SpecError, load_map_spec, serialize_map_spec, validate
from .tree_tower import TowerError, decomposition_census, tower_build

OK, DOMAIN, USAGE = 0, 1, 2
FORMATS = ("csv", "svg", "dot", "report")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    out: Optional[Path]
    depth: int
    horizon: int
    shrink: Fraction
    bracket_width: Fraction
    formats: tuple[str, ...]

    def __post_init__(self):
        if self.depth < 0:
            raise UsageError("--depth must be non-negative")
        if self.horizon < 1:
            raise UsageError("--horizon must be positive")
        if not 0 < self.shrink < 1:
            raise UsageError("--shrink must lie strictly between 0 and 1")
        if self.bracket_width <= 0:
            raise UsageError("--bracket-width must be positive")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _write(path: Path, text: str) -> None:
    """Write via a temporary file and rename, so readers never see partial output."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, name: str, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        _write(cfg.out / name, text)


def _load(path: str):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return load_map_spec(p)


def _gamma(spec, text: Optional[str]):
    if text:
        return multicurve(spec, text).classes
    if spec.config is not None:
        return spec.config.classes
    return spec.essential


def _config(args) -> RunConfig:
    formats = tuple(args.format or ())
    return RunConfig(
        command=args.command,
        inputs=(args.spec,) if hasattr(args, "spec") else (),
        out=Path(args.out) if getattr(args, "out", None) else None,
        depth=getattr(args, "depth", 3),
        horizon=getattr(args, "horizon", 4096),
        shrink=getattr(args, "shrink", Fraction(4, 5)),
        bracket_width=getattr(args, "bracket_width", Fraction(1, 10**6)),
        formats=formats,
    )


# -- commands ----------------------------------------------------------------------


def cmd_validate(args) -> int:
    p = Path(args.spec)
    if not p.is_file():
        print(f"error: no such file: {args.spec}", file=sys.stderr)
        return USAGE
    try:
        spec = load_map_spec(p)
    except SpecError as exc:
        print(f"error   {exc}")
        return DOMAIN
    diag = validate(spec)
    text = diag.format()
    if text:
        print(text)
    if diag.ok:
        print("valid")
        return OK
    return DOMAIN


def cmd_analyze(args) -> int:
    cfg = _config(args)
    spec = _load(args.spec)
    gamma = args.gamma or ",".join(spec.essential)
    report = analysis_report(spec, gamma, cfg.bracket_width, cfg.depth)
    line = summary_line(report)
    print(line)
    fmts = cfg.formats or (("report",) if cfg.out else ())
    if "report" in fmts:
        _emit(cfg, "analysis.json", report_text(report))
    if "csv" in fmts:
        _emit(cfg, "kappa.csv", kappa_csv(report["multicurve"], kappa_table(spec, gamma, cfg.depth)))
    if args.require_no_obstruction and report["thurston_obstruction"]:
        return DOMAIN
    return OK


def _parse_itinerary(text: str) -> Itinerary:
    if text in ("thue-morse", "thue_morse", "tm"):
        return thue_morse()
    head_text, sep, cycle_text = text.partition("/")
    if not sep:
        head_text, cycle_text = "", head_text

    def nums(s: str) -> tuple[int, ...]:
        return tuple(int(x) for x in s.split(",") if x.strip())

    try:
        return Itinerary(nums(head_text), nums(cycle_text), name=text)
    except ValueError:
        raise UsageError(f"bad itinerary {text!r}; use 'thue-morse', 'C' or 'H/C' with comma lists") from None


def cmd_simulate(args) -> int:
    cfg = _config(args)
    spec = _load(args.spec)
    gamma = _gamma(spec, args.gamma)
    system = from_annular_rules(spec, gamma, cfg.shrink)
    level = refine(system, cfg.depth)
    fmts = cfg.formats or (("csv", "svg") if cfg.out else ("csv",))
    if "csv" in fmts:
        _emit(cfg, "intervals.csv", intervals_csv([level]))
    if "svg" in fmts:
        levels = [refine(system, k) for k in range(1, cfg.depth + 1)]
        _emit(cfg, "intervals.svg", intervals_svg(system, levels))
    report = {
        "multicurve": list(gamma),
        "depth": cfg.depth,
        "intervals": len(level.intervals),
        "expansion": expansion_report(system, min(cfg.horizon, 40)),
    }
    if args.itinerary:
        it = _parse_itinerary(args.itinerary)
        omega = omega_limit_approx(system, it, cfg.horizon, cfg.depth)
        report["itinerary"] = {
            "name": it.name,
            "class": classify(system, it),
            "omega_depth": omega.depth,
            "omega_horizon": omega.horizon,
            "omega_count": omega.count,
            "omega_addresses": [".".join(map(str, a)) for a in omega.addresses],
        }
        print(f"omega: {omega.count} distinct depth-{omega.depth} addresses")
    if "report" in fmts:
        _emit(cfg, "simulate.json", report_text(report))
    return OK


def cmd_tower(args) -> int:
    cfg = _config(args)
    spec = _load(args.spec)
    gamma = _gamma(spec, args.gamma)
    tower = tower_build(spec, gamma, cfg.depth, slope_cap=args.slope_cap)
    census = decomposition_census(spec, gamma, cfg.depth)
    fmts = cfg.formats or ("dot", "report")
    for n, tree in enumerate(tower.trees):
        lengths = tower.metric.lengths[n] if tower.metric else None
        if "dot" in fmts:
            _emit(cfg, f"T{n}.dot", tree_dot(tree, lengths))
        if "svg" in fmts:
            _emit(cfg, f"T{n}.svg", tree_svg(tree))
    if "csv" in fmts:
        _emit(cfg, "metric.csv", metric_csv(tower))
    if "report" in fmts:
        doc = {
            "multicurve": list(tower.gamma),
            "edge_counts": tower.edge_counts(),
            "tree_map_degree": tower.degree,
            "axioms": tower.checks,
            "totals": tower.totals(),
            "census": census,
        }
        _emit(cfg, "census.json", report_text(doc))
    counts = census.complex_counts
    if len(set(counts)) == 1:
        print(f"complex={counts[0]} every depth")
    else:
        print("complex=" + ",".join(map(str, counts)))
    print("edges=" + ",".join(map(str, tower.edge_counts())))
    return OK


def cmd_folding(args) -> int:
    if args.folding == "plan":
        recipes = [r for r in ("apply1", "apply1_pair", "apply2", "apply2_pair") if getattr(args, r)]
        if len(recipes) != 1:
            raise UsageError("choose exactly one of --apply1, --apply1-pair, --apply2, --apply2-pair")
        which = recipes[0]
        deg = (args.deg_g, args.deg_g2) if which.endswith("_pair") else args.deg_g
        if which.endswith("_pair") and args.deg_g2 is None:
            raise UsageError(f"--{which.replace('_', '-')} needs --deg-g2")
        plan = plan_from_recipe(which, deg, args.degree, args.p)
        text = plan_to_text(plan)
        if args.out:
            _write(Path(args.out), text)
        else:
            sys.stdout.write(text)
        return OK
    if not Path(args.plan).is_file():
        raise FileNotFoundError(f"no such file: {args.plan}")
    plan = load_plan(args.plan)
    if args.folding == "emit":
        text = serialize_map_spec(emit_map_spec(plan))
        if args.out:
            _write(Path(args.out), text)
        else:
            sys.stdout.write(text)
        return OK
    universe = _load(args.spec) if args.spec else None
    certs = certify_plan(plan, universe)
    for c in certs:
        if c.kind == "thm_no1":
            if c.applicable:
                print(f"thm_no1: no obstruction (N={c.data['N']})")
            else:
                print(f"thm_no1: inapplicable (d0={c.data['d0']} >= m={c.data['m']})")
        elif c.kind == "thm_no2":
            verdict = "accepted" if c.accepted else "rejected"
            print(f"thm_no2: {verdict}; " + "; ".join(c.notes))
        elif c.kind == "obstruction_found":
            found = c.data["multicurves"]
            print("obstruction: " + ("; ".join(",".join(g) for g in found) if found else "none found") + f" ({c.notes[0]})")
    if args.out:
        _write(Path(args.out), "".join(c.to_text() for c in certs))
    found = any(c.kind == "obstruction_found" and c.accepted for c in certs)
    return DOMAIN if found and args.require_no_obstruction else OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cantordyn", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, depth=3):
        p.add_argument("spec", help="map-spec file")
        p.add_argument("--gamma", help="comma-separated curve classes")
        p.add_argument("--depth", type=int, default=depth)
        p.add_argument("--out", help="output directory (default: stdout)")
        p.add_argument("--format", action="append", choices=FORMATS, help="repeatable")

    p = sub.add_parser("validate", help="check a map-spec file")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="transition matrices, eigenvalues and flags")
    common(p, depth=6)
    p.add_argument("--bracket-width", type=_rational, default=Fraction(1, 10**6))
    p.add_argument("--require-no-obstruction", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="linear interval model")
    common(p)
    p.add_argument("--shrink", type=_rational, default=Fraction(4, 5))
    p.add_argument("--horizon", type=int, default=4096)
    p.add_argument("--itinerary", help="'thue-morse', 'C' or 'H/C' (comma lists of child indices)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tower", help="dual-tree tower and census")
    common(p)
    p.add_argument("--slope-cap", type=_rational, help="λ₁ for the length bound")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("folding", help="folding plans")
    fsub = p.add_subparsers(dest="folding", required=True)
    pp = fsub.add_parser("plan", help="degree sequence from a recipe")
    for r in ("apply1", "apply1-pair", "apply2", "apply2-pair"):
        pp.add_argument(f"--{r}", dest=r.replace("-", "_"), action="store_true")
    pp.add_argument("--deg-g", type=int, required=True)
    pp.add_argument("--deg-g2", type=int)
    pp.add_argument("--degree", type=int, required=True)
    pp.add_argument("--p", type=int, help="post-critical count")
    pp.add_argument("--out", help="output file")
    pc = fsub.add_parser("check", help="certificates for a plan")
    pc.add_argument("plan")
    pc.add_argument("--out", help="certificate file")
    pc.add_argument("--spec", help="map-spec whose curve classes the obstruction scan covers")
    pc.add_argument("--require-no-obstruction", action="store_true")
    pe = fsub.add_parser("emit", help="map-spec realizing a plan")
    pe.add_argument("plan")
    pe.add_argument("--out", help="output file")
    p.set_defaults(func=cmd_folding)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return USAGE
    except (SpecError, MulticurveError, LinearModelError, TowerError, FoldingError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
