"""
Homology of the graded complexes: dimensions per (sector, delta), reports
in JSON and as an aligned table, the untwisted GF(2) comparison and report
diffing.

Over a field the delta-graded dimension table is a complete invariant of a
sector, so reports carry dimensions only.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field

import networkx as nx

from complexes import (
    DEFAULT_MAX_CROSSINGS,
    ChainError,
    GradedComplex,
    PreconditionError,
    SectorIndex,
    build_all_ct,
    build_sk,
    delta_grading,
    generator_key,
    guard_crossings,
    n_plus_of,
    sigma_delta,
    sk_states,
)
from gf2fun import rank_gf2
from resolution import GlyphKey
from surface_diagram import SurfaceDiagram, crossing_signs

WHICH = ("SK", "CT", "both")


# ---------------------------------------------------------------------------
# Pure core
# ---------------------------------------------------------------------------

def homology_dims(c: GradedComplex) -> dict[int, int]:
    """dim H at every delta of the complex (zeros included); checks d^2 = 0 first."""
    c.check_square_zero()
    ranks = {delta: c.rank_at(delta) for delta in c.deltas}
    return {
        delta: len(gens) - ranks.get(delta, 0) - ranks.get(delta - 2, 0)
        for delta, gens in sorted(c.generators.items())}


def euler_check(c: GradedComplex, dims: dict[int, int] | None = None) -> bool:
    """Alternating sums (sign (-1)^(delta // 2)) of chain and homology dims agree."""
    dims = dims if dims is not None else homology_dims(c)
    chain = sum((-1) ** (delta // 2) * n for delta, n in c.chain_dims().items())
    hom = sum((-1) ** (delta // 2) * n for delta, n in dims.items())
    return chain == hom


@dataclass(frozen=True)
class SectorDims:
    glyph: GlyphKey
    dims: dict[int, int]                 # nonzero homology dims only
    chain_dims: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def to_json(self) -> dict:
        out: dict = {"glyph": self.glyph.to_json()}
        if self.glyph.matching:
            out["matching"] = [list(p) for p in self.glyph.matching]
        if self.glyph.colored_chi is not None:
            out["colored_chi"] = self.glyph.colored_chi
        out["dims"] = {str(delta): n for delta, n in sorted(self.dims.items())}
        return out


@dataclass(frozen=True)
class HomologyReport:
    kind: str
    n_plus: int
    n_minus: int
    colored: bool
    sectors: tuple[SectorDims, ...]

    def nonzero(self) -> list[SectorDims]:
        return [s for s in self.sectors if s.dims]

    def table(self) -> dict[tuple[GlyphKey, int], int]:
        return {(s.glyph, delta): n for s in self.sectors for delta, n in s.dims.items()}

    def dims_for(self, glyph: GlyphKey) -> dict[int, int]:
        for s in self.sectors:
            if s.glyph == glyph:
                return dict(s.dims)
        return {}

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "colored": self.colored,
            "sectors": [s.to_json() for s in self.sectors],
        }


def render_table(report: HomologyReport, width: int = 64) -> str:
    """Aligned plain-text rendering of a report (pure)."""
    rule = "─" * width
    lines = [rule, f"  Skein homology ({report.kind})  n+ = {report.n_plus}  n- = {report.n_minus}", rule]
    rows = [(s.glyph.render(), delta, n) for s in report.sectors for delta, n in sorted(s.dims.items())]
    if not rows:
        lines.append("  (all sectors trivial)")
    else:
        label_w = max(len(label) for label, _, _ in rows)
        lines.append(f"  {'glyph'.ljust(label_w)}  {'delta':>5}  {'dim':>4}")
        for label, delta, n in rows:
            lines.append(f"  {label.ljust(label_w)}  {delta:>5}  {n:>4}")
    trivial = sum(1 for s in report.sectors if not s.dims)
    if trivial:
        lines.append("")
        lines.append(f"  {trivial} sector(s) with generators but zero homology")
    lines.append(rule)
    return "\n".join(lines) + "\n"


def _sector_dims(complexes: dict[GlyphKey, GradedComplex]) -> tuple[SectorDims, ...]:
    out = []
    for key, c in complexes.items():
        dims = homology_dims(c)
        if not euler_check(c, dims):
            raise ChainError(f"Euler characteristic mismatch in sector {key.render()}")
        out.append(SectorDims(key, {delta: n for delta, n in dims.items() if n}, c.chain_dims()))
    return tuple(out)


def compare_reports(a: HomologyReport, b: HomologyReport, *,
                    up_to_classes: bool = False) -> tuple[bool, str]:
    """Equal dimension tables per (glyph, delta); otherwise the first difference.

    Closed-surface class keys live in each diagram's own edge coordinates.
    With up_to_classes, two reports also agree when some one-to-one
    relabeling of curve classes carries one table onto the other.
    """
    ta, tb = a.table(), b.table()
    for key in sorted(set(ta) | set(tb), key=lambda gd: (gd[0].render(), gd[1])):
        if ta.get(key, 0) != tb.get(key, 0):
            glyph, delta = key
            difference = (f"glyph {glyph.render()} delta {delta}: "
                          f"{a.kind} has {ta.get(key, 0)}, {b.kind} has {tb.get(key, 0)}")
            break
    else:
        return True, f"{len(ta)} nonzero (glyph, delta) entries agree"
    if not up_to_classes:
        return False, difference
    if nx.is_isomorphic(_class_graph(a), _class_graph(b),
                        node_match=operator.eq, edge_match=operator.eq):
        return True, f"{len(ta)} nonzero (glyph, delta) entries agree up to relabeling curve classes"
    return False, f"no relabeling of curve classes matches; {difference}"


def _class_graph(report: HomologyReport) -> nx.Graph:
    """Nonzero sectors joined to the curve classes their glyphs label."""
    g = nx.Graph()
    for i, s in enumerate(report.nonzero()):
        g.add_node(("sector", i), dims=tuple(sorted(s.dims.items())),
                   matching=s.glyph.matching, chi=s.glyph.colored_chi)
        for key, label in s.glyph.entries:
            g.add_node(("class", key), dims=None, matching=None, chi=None)
            g.add_edge(("sector", i), ("class", key), label=label)
    return g


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def homology_report(d: SurfaceDiagram, which: str = "CT", colored: bool = False, *,
                    max_crossings: int = DEFAULT_MAX_CROSSINGS) -> HomologyReport:
    """Dims of every sector with generators; "both" cross-checks SK against CT."""
    if which not in WHICH:
        raise ValueError(f"which must be one of {', '.join(WHICH)}, got {which!r}")
    if colored and which != "CT":
        raise PreconditionError("colored sectors are defined on the collapsed complex; use --which CT")
    guard_crossings(d, max_crossings)
    n_plus, n_minus, _ = crossing_signs(d) if d.n else (0, 0, ())
    reports = {}
    if which in ("CT", "both"):
        ct = build_all_ct(d, colored=colored, max_crossings=max_crossings)
        reports["CT"] = HomologyReport("CT", n_plus, n_minus, colored, _sector_dims(ct))
    if which in ("SK", "both"):
        sk = build_sk(d, max_crossings=max_crossings)
        reports["SK"] = HomologyReport("SK", n_plus, n_minus, False, _sector_dims(sk))
    if which == "both":
        ok, message = compare_reports(reports["SK"], reports["CT"])
        if not ok:
            raise ChainError(f"SK and CT homology disagree: {message}")
        return reports["CT"]
    return reports[which]


def untwisted_homology(d: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> HomologyReport:
    """Homology of the SK generators under d_Sigma alone, over GF(2)."""
    guard_crossings(d, max_crossings)
    n_plus = n_plus_of(d)
    n_minus = d.n - n_plus
    split = SectorIndex(d).split(sk_states(d))
    sectors = []
    for key in sorted(split, key=lambda g: (g.matching, g.entries)):
        gens: dict[int, list] = {}
        for s in sorted(split[key], key=generator_key):
            gens.setdefault(delta_grading(s, n_plus), []).append(s)
        where = {s: i for lst in gens.values() for i, s in enumerate(lst)}
        ranks = {}
        for delta, lst in gens.items():
            targets = gens.get(delta + 2, [])
            if not targets:
                continue
            rows = []
            for s in lst:
                row = [0] * len(targets)
                for t in sigma_delta(d, s):
                    row[where[t]] ^= 1
                rows.append(row)
            ranks[delta] = rank_gf2(rows, len(targets))
        dims = {
            delta: len(lst) - ranks.get(delta, 0) - ranks.get(delta - 2, 0)
            for delta, lst in gens.items()}
        chain = {delta: len(lst) for delta, lst in sorted(gens.items())}
        sectors.append(SectorDims(key, {delta: n for delta, n in sorted(dims.items()) if n}, chain))
    return HomologyReport("untwisted", n_plus, n_minus, False, tuple(sectors))

