#!/usr/bin/env python3
"""
Totally twisted skein homology of link and tangle diagrams on surfaces.

Verbs:
  validate FILE...          parse and check diagrams, print the surface profile
  resolutions FILE          every resolution with its circles and arcs
  complex FILE              SK or CT complexes, sector by sector
  homology FILE             dimension table per (glyph, delta)
  compare A B               equal homology tables?
  transform FILE OP         mirror | shift | reidemeister | complete, writes JSON
  check [FILE...]           symmetry, invariance and grading-law verdicts;
                            with no files, runs them on seeded random diagrams

Exit status: 0 on success, 1 on a domain error or a failed verdict, 2 on
usage errors. Diagnostics go to stderr; results go to stdout.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Callable

from complexes import ChainError, PreconditionError, build_all_ct, build_sk
from diagram_gen import random_closed_diagram, random_disk_tangle, random_move
from gf2fun import parse_poly, set_gcd_term_bound
from homology import WHICH, HomologyReport, compare_reports, homology_report, render_table
from resolution import all_codes, normalize_code, resolution_data
from settings import Settings, load_env_file, load_settings, resolve_env_path
from surface_diagram import (
    DiagramError,
    SurfaceDiagram,
    checkerboard,
    crossing_signs,
    dump_diagram,
    is_alternating,
    parse_diagram,
    surface_profile,
)
from transforms import (
    MOVE_KINDS,
    MoveSpec,
    alternating_theorem_check,
    annular_alternating_check,
    apply_reidemeister,
    arc_tangle_check,
    complete_alternating_tangle,
    disk_tangle_check,
    glyph_negation_check,
    jaeger_invariance_check,
    jaeger_shift,
    mirror,
    mirror_duality_check,
    punctured_plane_check,
    reidemeister_check,
)

TRANSFORMS = ("mirror", "shift", "reidemeister", "complete")


def load_diagram(path: str) -> SurfaceDiagram:
    p = Path(path).expanduser()
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DiagramError(f"cannot read {p}: {e.strerror}") from None
    try:
        return parse_diagram(text)
    except DiagramError as e:
        raise DiagramError(f"{p.name}: {e}") from None


def emit_json(data) -> None:
    print(json.dumps(data, indent=2))


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_validate(args, settings: Settings) -> int:
    out = []
    for path in args.files:
        d = load_diagram(path)
        profile = surface_profile(d)
        row = {
            "file": path,
            "mode": d.mode,
            "genus": profile.genus,
            "euler_char": profile.euler_char,
            "crossings": d.n,
            "edges": len(d.edges),
            "faces": len(d.map.faces),
            "punctures": profile.puncture_count,
            "colorable": profile.colorable,
            "alternating": is_alternating(d),
        }
        if all(d.map.direction):
            n_plus, n_minus, _ = crossing_signs(d)
            row["n_plus"], row["n_minus"] = n_plus, n_minus
        out.append(row)
    if args.json:
        emit_json(out)
        return 0
    for row in out:
        signs = f"  n+={row['n_plus']} n-={row['n_minus']}" if "n_plus" in row else ""
        print(f"{row['file']}: valid {row['mode']} diagram, genus {row['genus']}, "
              f"{row['crossings']} crossing(s), {row['faces']} face(s), {row['punctures']} puncture(s)"
              f"{', colorable' if row['colorable'] else ''}{', alternating' if row['alternating'] else ''}{signs}")
    return 0


def cmd_resolutions(args, settings: Settings) -> int:
    d = load_diagram(args.file)
    codes = [normalize_code(d, args.code)] if args.code else all_codes(d.n)
    if not args.code and d.n > args.max_crossings:
        raise PreconditionError(f"diagram has {d.n} crossings, above MAX_CROSSINGS={args.max_crossings}")
    out = []
    for code in codes:
        data = resolution_data(d, code)
        r = data.resolution
        out.append({
            "code": "".join(map(str, code)),
            "circles": [
                {"edges": sorted(d.edges[k].id for k in curve.edges),
                 "contractible": info.contractible,
                 "weight": info.weight.render(),
                 "class": list(info.class_key),
                 "isotopy_group": info.isotopy_group}
                for curve, info in zip(r.circles, data.infos)],
            "arcs": [
                {"edges": sorted(d.edges[k].id for k in curve.edges), "ends": list(curve.ends)}
                for curve in r.arcs],
        })
    if args.json:
        emit_json(out)
        return 0
    for row in out:
        n_contractible = sum(1 for c in row["circles"] if c["contractible"])
        print(f"{row['code']}  {len(row['circles'])} circle(s), {n_contractible} contractible, "
              f"{len(row['arcs'])} arc(s)")
        for ci, c in enumerate(row["circles"]):
            kind = "contractible" if c["contractible"] else f"class {tuple(c['class'])}"
            print(f"    C{ci}  {kind:<24} weight {c['weight']:<16} edges {' '.join(c['edges'])}")
        for ai, a in enumerate(row["arcs"]):
            print(f"    A{ai}  ends {a['ends'][0]}-{a['ends'][1]}  edges {' '.join(a['edges'])}")
    return 0


def _select(items: dict, sector: str | None) -> dict:
    if sector is None:
        return items
    chosen = {key: value for key, value in items.items() if key.render() == sector}
    if not chosen:
        known = ", ".join(repr(key.render()) for key in items) or "none"
        raise PreconditionError(f"no sector {sector!r}; sectors with generators: {known}")
    return chosen


def cmd_complex(args, settings: Settings) -> int:
    d = load_diagram(args.file)
    if args.which == "both":
        raise PreconditionError("complex dumps one pipeline at a time; use --which SK or --which CT")
    if args.which == "SK":
        if args.colored:
            raise PreconditionError("colored sectors are defined on the collapsed complex; use --which CT")
        sectors = build_sk(d, max_crossings=args.max_crossings)
    else:
        sectors = build_all_ct(d, colored=args.colored, max_crossings=args.max_crossings)
    sectors = _select(sectors, args.sector)
    if args.json:
        emit_json([c.to_json() for c in sectors.values()])
        return 0
    for key, c in sectors.items():
        print(f"{c.kind} sector {key.render()}")
        for delta, gens in sorted(c.generators.items()):
            print(f"  delta {delta:>3}: {' '.join(s.label() for s in gens)}")
        for s, t, coeff in c.entries():
            print(f"    {s.label()} -> {t.label()}  {coeff.render()}")
    return 0


def cmd_homology(args, settings: Settings) -> int:
    d = load_diagram(args.file)
    report = homology_report(d, args.which, args.colored, max_crossings=args.max_crossings)
    if args.sector is not None:
        kept = _select({s.glyph: s for s in report.sectors}, args.sector)
        report = HomologyReport(report.kind, report.n_plus, report.n_minus, report.colored,
                                tuple(kept.values()))
    if args.json:
        emit_json(report.to_json())
    else:
        print(render_table(report), end="")
    return 0


def cmd_compare(args, settings: Settings) -> int:
    first, second = load_diagram(args.first), load_diagram(args.second)
    a = homology_report(first, args.which, args.colored, max_crossings=args.max_crossings)
    b = homology_report(second, args.which, args.colored, max_crossings=args.max_crossings)
    # two unrelated files share no edge coordinates for closed-surface classes
    closed = "closed" in (first.mode, second.mode)
    ok, message = compare_reports(a, b, up_to_classes=closed)
    if args.json:
        emit_json({"equivalent": ok, "detail": message})
    else:
        print(f"{'equivalent' if ok else 'not equivalent'}: {message}")
    return 0 if ok else 1


def cmd_transform(args, settings: Settings) -> int:
    d = load_diagram(args.file)
    if args.op == "mirror":
        out = mirror(d)
    elif args.op == "shift":
        if args.edge is None or args.crossing is None:
            raise PreconditionError("shift needs --edge and --crossing")
        amount = parse_poly(args.amount) if args.amount else None
        out = jaeger_shift(d, args.edge, args.crossing, amount)
    elif args.op == "reidemeister":
        if args.move:
            site = tuple(x for x in (args.site or "").split(",") if x)
            move = MoveSpec(args.move, site)
        else:
            move = random_move(d, random.Random(args.seed))
            print(f"move: {move.render()}", file=sys.stderr)
        out = apply_reidemeister(d, move)
    else:
        out = complete_alternating_tangle(d)
    text = dump_diagram(out) + "\n"
    if args.output:
        Path(args.output).expanduser().write_text(text, encoding="utf-8")
        print(f"Wrote {args.output}", file=sys.stderr)
    else:
        print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _both_pipelines(d: SurfaceDiagram, max_crossings: int) -> tuple[bool, str]:
    report = homology_report(d, "both", max_crossings=max_crossings)
    return True, f"SK and CT agree on {len(report.table())} nonzero entries"


def verdict_suite(d: SurfaceDiagram, rng: random.Random, trials: int,
                  max_crossings: int) -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    suite = [
        ("sk_equals_ct", lambda: _both_pipelines(d, max_crossings)),
        ("glyph_negation", lambda: glyph_negation_check(homology_report(d, "CT", max_crossings=max_crossings))),
        ("mirror_duality", lambda: mirror_duality_check(d, max_crossings=max_crossings)),
        ("weight_shift", lambda: jaeger_invariance_check(d, max_crossings=max_crossings)),
        ("reidemeister", lambda: reidemeister_check(d, rng, trials, max_crossings=max_crossings + 2)),
    ]
    if d.is_disk:
        suite.append(("arc_tangle", lambda: arc_tangle_check(d, max_crossings=max_crossings)))
        suite.append(("disk_tangle", lambda: disk_tangle_check(d, max_crossings=max_crossings)))
    elif is_alternating(d) and surface_profile(d).colorable and checkerboard(d).convention_ok:
        suite.append(("alternating_theorem", lambda: alternating_theorem_check(d, max_crossings=max_crossings)))
        if d.mode == "planar" and d.marked_faces:
            suite.append(("punctured_plane", lambda: punctured_plane_check(d, max_crossings=max_crossings)))
            if len(d.marked_faces) == 2:
                suite.append(("annular", lambda: annular_alternating_check(d, max_crossings=max_crossings)))
    return suite


def run_checks(label: str, d: SurfaceDiagram, rng: random.Random, trials: int,
               max_crossings: int, tally: dict[str, int]) -> None:
    print(f"checking {label} ({d.n} crossing(s))", file=sys.stderr)
    for name, verdict in verdict_suite(d, rng, trials, max_crossings):
        try:
            ok, message = verdict()
        except PreconditionError as e:
            print(f"SKIP  {label}  {name}: {e}")
            tally["skipped"] += 1
            continue
        except ChainError as e:
            ok, message = False, str(e)
        print(f"{'PASS' if ok else 'FAIL'}  {label}  {name}: {message}")
        tally["passed" if ok else "failed"] += 1


def random_diagrams(rng: random.Random, count: int) -> list[tuple[str, SurfaceDiagram]]:
    out = []
    for k in range(count):
        n = 1 + k % 3
        if k % 3 == 0:
            out.append((f"random-closed-{k}", random_closed_diagram(n, rng, alternating=k % 2 == 0)))
        elif k % 3 == 1:
            out.append((f"random-tangle-{k}", random_disk_tangle(n, rng, alternating=True)))
        else:
            out.append((f"random-linked-tangle-{k}", random_disk_tangle(max(n, 2), rng, arcs_only=False)))
    return out


def cmd_check(args, settings: Settings) -> int:
    rng = random.Random(args.seed)
    trials = settings.RANDOM_TRIALS
    if args.files:
        diagrams = [(path, load_diagram(path)) for path in args.files]
    else:
        diagrams = random_diagrams(rng, trials)
        trials = max(1, trials // 4)
    tally = {"passed": 0, "failed": 0, "skipped": 0}
    for label, d in diagrams:
        run_checks(label, d, rng, trials, args.max_crossings, tally)
    print(f"{tally['passed']} passed, {tally['failed']} failed, {tally['skipped']} skipped")
    return 1 if tally["failed"] else 0


COMMANDS = {
    "validate": cmd_validate,
    "resolutions": cmd_resolutions,
    "complex": cmd_complex,
    "homology": cmd_homology,
    "compare": cmd_compare,
    "transform": cmd_transform,
    "check": cmd_check,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _which(text: str) -> str:
    value = "both" if text.lower() == "both" else text.upper()
    if value not in WHICH:
        raise argparse.ArgumentTypeError(f"expected SK, CT or both, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="Machine-readable JSON output")
    fmt.add_argument("--table", action="store_true", help="Aligned text output (default)")
    common.add_argument(
        "--max-crossings", type=int, default=None, metavar="N",
        help="Refuse diagrams with more crossings (default: MAX_CROSSINGS from .env, else 12)")
    common.add_argument(
        "--seed", type=int, default=None,
        help="Seed for randomized moves and diagrams (default: DEFAULT_SEED from .env, else 0)")
    common.add_argument(
        "--config", metavar="PATH", default=None,
        help="Path to the .env config file (default: alongside this script)")

    homology_opts = argparse.ArgumentParser(add_help=False)
    homology_opts.add_argument(
        "--which", type=_which, default="CT",
        help="SK (full complex), CT (collapsed complex) or both (cross-checked); default CT")
    homology_opts.add_argument(
        "--colored", action="store_true",
        help="Split CT sectors further by the Euler characteristic of the black regions")
    homology_opts.add_argument(
        "--sector", metavar="GLYPH", default=None,
        help="Only the sector whose rendered glyph matches, e.g. \"+1g(1) -1g(2)\" or \"trivial\"")

    parser = argparse.ArgumentParser(
        description="Totally twisted skein homology of link and tangle diagrams on surfaces.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s validate fixtures/ex1.json
  %(prog)s homology fixtures/ex1.json --which both
  %(prog)s homology fixtures/ex3.json --colored --json
  %(prog)s complex fixtures/ex1.json --which CT --sector "+1g(1)"
  %(prog)s compare fixtures/ex5.json fixtures/ex5_r1.json
  %(prog)s transform fixtures/kink_positive.json reidemeister --move R1+ --site tail,left
  %(prog)s check fixtures/trefoil_annular.json
  %(prog)s check --seed 7                  # randomized suite

Configuration:
  MAX_CROSSINGS, GCD_TERM_BOUND, DEFAULT_SEED and RANDOM_TRIALS are read
  from .env (see .env.example); command-line flags take precedence.
        """,
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("validate", parents=[common], help="Check diagrams and print their surface profile")
    p.add_argument("files", nargs="+", metavar="FILE")

    p = sub.add_parser("resolutions", parents=[common], help="List resolutions, circles and arcs")
    p.add_argument("file", metavar="FILE")
    p.add_argument("--code", default=None, help="One resolution, e.g. 0110 (default: all)")

    p = sub.add_parser("complex", parents=[common, homology_opts], help="Dump SK or CT complexes")
    p.add_argument("file", metavar="FILE")

    p = sub.add_parser("homology", parents=[common, homology_opts], help="Homology dimensions per sector")
    p.add_argument("file", metavar="FILE")

    p = sub.add_parser("compare", parents=[common, homology_opts], help="Compare two diagrams' homology")
    p.add_argument("first", metavar="A")
    p.add_argument("second", metavar="B")

    p = sub.add_parser("transform", parents=[common], help="Mirror, shift weights, move or complete a diagram")
    p.add_argument("file", metavar="FILE")
    p.add_argument("op", choices=TRANSFORMS)
    p.add_argument("--edge", default=None, help="shift: edge id whose weight moves")
    p.add_argument("--crossing", default=None, help="shift: crossing id the weight moves past")
    p.add_argument("--amount", default=None, help="shift: polynomial to move (default: the whole weight, which zeroes the "
                        "edge; only an explicit amount undoes itself when applied twice)")
    p.add_argument("--move", choices=MOVE_KINDS, default=None,
                   help="reidemeister: move kind (default: a random admissible move)")
    p.add_argument("--site", default=None, help="reidemeister: comma-separated site, e.g. e1,left")
    p.add_argument("-o", "--output", default=None, metavar="PATH", help="Write JSON here instead of stdout")

    p = sub.add_parser("check", parents=[common], help="Run the symmetry, invariance and grading checks")
    p.add_argument("files", nargs="*", metavar="FILE")
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    script_dir = Path(__file__).parent.resolve()
    env_path = resolve_env_path(script_dir, args.config)
    if args.config and not env_path.is_file():
        print(f"Error: --config file not found: {env_path}", file=sys.stderr)
        return 1
    try:
        settings = load_settings(load_env_file(env_path))
        set_gcd_term_bound(settings.GCD_TERM_BOUND)
        if args.max_crossings is None:
            args.max_crossings = settings.MAX_CROSSINGS
        if args.seed is None:
            args.seed = settings.DEFAULT_SEED
        return COMMANDS[args.verb](args, settings)
    except (ValueError, ZeroDivisionError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


def main():
    """Main entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
