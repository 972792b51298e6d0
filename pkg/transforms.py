"""
Diagram-level operations and the verdicts built on them.

  mirror / mirror_duality_check        crossing switch; HT_d(mirror, g) = HT_{-d-2k}(T, g)
  glyph_negation_check                 HT_d(T, -g) = HT_{d-2k}(T, g)
  jaeger_shift / jaeger_invariance_check
                                       move weight w past a crossing along its strand
                                       (both edges gain w in characteristic 2)
  apply_reidemeister / admissible_moves / reidemeister_check
                                       R1+, R1-, R2, R3 and the inverse R1/R2 moves as
                                       rotation-system surgery; new edges get fresh
                                       variables, removed edges fold their weights into
                                       the surviving edge
  track_reidemeister / EdgeTransport   the move plus the edge paths it induces, which
                                       carry closed-surface class keys across it
  goeritz_signature / signature_alternating
                                       Gordon-Litherland signature of a planar diagram
  annular_alternating_check / punctured_plane_check / alternating_theorem_check
  complete_alternating_tangle / disk_tangle_check

Every verdict function returns (ok, message).
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from sympy import Matrix, symbols

from complexes import (
    DEFAULT_MAX_CROSSINGS,
    PreconditionError,
    build_all_ct,
    delta_grading,
    n_plus_of,
)
from gf2fun import PolyGF2, sign_canonical
from homology import HomologyReport, SectorDims, compare_reports, homology_report, untwisted_homology
from resolution import GlyphKey, class_lattice, resolve, state_color_chi
from surface_diagram import (
    Component,
    Crossing,
    Edge,
    FaceGroup,
    MarkedFace,
    SurfaceDiagram,
    checkerboard,
    crossing_signs,
    is_alternating,
    surface_profile,
    validated,
    with_weights,
)

Verdict = tuple[bool, str]

MOVE_KINDS = ("R1+", "R1-", "R2", "R3", "R1-inverse", "R2-inverse")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def fresh_variable(d: SurfaceDiagram) -> int:
    """The least variable id above every variable in use."""
    used = [v for e in d.edges for v in e.weight.variables()]
    return max(used, default=0) + 1


class _Namer:
    def __init__(self, d: SurfaceDiagram):
        self.used = set(d.map.names) | {e.id for e in d.edges} | {c.id for c in d.crossings}

    def fresh(self, base: str) -> str:
        name = base
        k = 1
        while name in self.used:
            k += 1
            name = f"{base}{k}"
        self.used.add(name)
        return name


def _edge_index(d: SurfaceDiagram, edge) -> int:
    if isinstance(edge, int):
        if not 0 <= edge < len(d.edges):
            raise PreconditionError(f"edge index {edge} out of range")
        return edge
    for k, e in enumerate(d.edges):
        if e.id == str(edge):
            return k
    raise PreconditionError(f"unknown edge {edge!r}")


def _crossing_index(d: SurfaceDiagram, crossing) -> int:
    if isinstance(crossing, int):
        if not 0 <= crossing < d.n:
            raise PreconditionError(f"crossing index {crossing} out of range")
        return crossing
    for i, c in enumerate(d.crossings):
        if c.id == str(crossing):
            return i
    raise PreconditionError(f"unknown crossing {crossing!r}")


def _dart(d: SurfaceDiagram, name: str) -> int:
    try:
        return d.map.index[name]
    except KeyError:
        raise PreconditionError(f"unknown half-edge {name!r}") from None


def _rebuild(d: SurfaceDiagram, *, crossings: Iterable[Crossing], edges: Iterable[Edge],
             added: dict[str, list[str]] | None = None, removed_darts: set[int] = frozenset(),
             boundary: tuple[str, ...] | None = None, mode: str | None = None,
             marked: tuple[MarkedFace, ...] | None = None) -> SurfaceDiagram:
    """Assemble a diagram after surgery, carrying components, marks and groups.

    `added` maps an old edge id to the new edge ids that join its component;
    references to removed darts are moved to a surviving dart of the same
    face (marks, groups) or strand (orientation).
    """
    m = d.map
    edges = tuple(edges)
    alive = {e.id for e in edges}
    added = added or {}
    components = []
    for comp in d.components:
        ids = [e for e in comp.edges if e in alive]
        for e in comp.edges:
            ids += [x for x in added.get(e, []) if x not in ids]
        oriented = comp.oriented_from
        if oriented is not None and m.index[oriented] in removed_darts:
            oriented = _surviving_orientation(d, comp, removed_darts)
        components.append(Component(tuple(ids), oriented))
    marks = tuple(
        MarkedFace(_face_ref(d, mf.at_left_of, removed_darts), mf.infinity)
        for mf in (d.marked_faces if marked is None else marked))
    groups = tuple(
        FaceGroup(tuple(_face_ref(d, f, removed_darts) for f in g.faces), g.genus)
        for g in d.face_groups)
    new = SurfaceDiagram(
        mode=mode or d.mode, crossings=tuple(crossings), edges=edges,
        components=tuple(components), marked_faces=marks,
        boundary=d.boundary if boundary is None else boundary,
        face_groups=groups, declared_genus=d.declared_genus)
    return validated(new)


def _face_ref(d: SurfaceDiagram, name: str, removed: set[int]) -> str:
    m = d.map
    h = m.index[name]
    if h not in removed:
        return name
    for x in m.faces[m.face_of[h]].walk:
        if x not in removed:
            return m.names[x]
    raise PreconditionError(f"face at {name!r} has no half-edge outside the move site")


def _surviving_orientation(d: SurfaceDiagram, comp: Component, removed: set[int]) -> str | None:
    m = d.map
    edge_index = {e.id: k for k, e in enumerate(d.edges)}
    ids = {edge_index[e] for e in comp.edges}
    for h in range(len(m.names)):
        if h not in removed and m.edge_of[h] in ids and m.direction[m.edge_of[h]] and m.forward(h):
            return m.names[h]
    return None


def _crossing_darts(i: int) -> set[int]:
    return {4 * i + p for p in range(4)}


# ---------------------------------------------------------------------------
# Mirror and symmetry verdicts
# ---------------------------------------------------------------------------

def mirror(d: SurfaceDiagram) -> SurfaceDiagram:
    """Switch every crossing; the rotation moves by one so the old over pair is under."""
    crossings = tuple(
        Crossing(c.id, c.halfedges[1:] + c.halfedges[:1]) for c in d.crossings)
    return validated(replace(d, crossings=crossings))


def glyph_negation_check(report: HomologyReport) -> Verdict:
    table = report.table()
    for (g, delta), dim in sorted(table.items(), key=lambda kv: (kv[0][0].render(), kv[0][1])):
        partner = (g.negated(), delta + 2 * g.k)
        if table.get(partner, 0) != dim:
            return False, (f"dim HT_{delta}({g.render()}) = {dim} but "
                           f"dim HT_{partner[1]}({partner[0].render()}) = {table.get(partner, 0)}")
    return True, f"glyph negation duality holds on {len(table)} entries"


def mirror_duality_check(d: SurfaceDiagram, *, which: str = "CT",
                         max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    original = homology_report(d, which, max_crossings=max_crossings).table()
    mirrored = homology_report(mirror(d), which, max_crossings=max_crossings).table()
    if sum(original.values()) != sum(mirrored.values()):
        return False, (f"total dimension {sum(original.values())} differs from the mirror's "
                       f"{sum(mirrored.values())}")
    for (g, delta), dim in mirrored.items():
        expected = original.get((g, -delta - 2 * g.k), 0)
        if expected != dim:
            return False, (f"mirror has dim {dim} at ({g.render()}, {delta}) but the diagram has "
                           f"{expected} at delta {-delta - 2 * g.k}")
    return True, f"mirror duality holds on {len(mirrored)} entries"


# ---------------------------------------------------------------------------
# Weight shifts
# ---------------------------------------------------------------------------

def jaeger_shift(d: SurfaceDiagram, edge, crossing, amount: PolyGF2 | None = None) -> SurfaceDiagram:
    """Move `amount` (default: all of the edge's weight) past `crossing` along the strand.

    Both edges gain `amount`, so the same explicit amount applied twice is
    the identity. The default is not: it zeroes the edge, and a second
    default shift of a zero weight changes nothing.
    """
    k = _edge_index(d, edge)
    i = _crossing_index(d, crossing)
    m = d.map
    ends = [h for h in range(len(m.names)) if m.edge_of[h] == k]
    at = [h for h in ends if m.is_crossing_dart(h) and h // 4 == i]
    if not at:
        raise PreconditionError(
            f"edge {d.edges[k].id!r} does not end at crossing {d.crossings[i].id!r}")
    if len(at) == 2:
        raise PreconditionError(
            f"edge {d.edges[k].id!r} has both ends at crossing {d.crossings[i].id!r}; "
            "the continuing edge is ambiguous")
    return shift_through(d, at[0], amount)


def shift_through(d: SurfaceDiagram, h: int, amount: PolyGF2 | None = None) -> SurfaceDiagram:
    """Shift weight from the edge ending at crossing dart h to the edge leaving opposite(h)."""
    m = d.map
    if not m.is_crossing_dart(h):
        raise PreconditionError(f"{m.names[h]!r} is a boundary point; weight cannot pass it")
    k, nxt = m.edge_of[h], m.edge_of[m.opposite(h)]
    if k == nxt:
        raise PreconditionError(
            f"edge {d.edges[k].id!r} continues into itself through {d.crossings[h // 4].id!r}")
    w = d.edges[k].weight if amount is None else amount
    weights = [e.weight for e in d.edges]
    weights[k] = weights[k] + w
    weights[nxt] = weights[nxt] + w
    return validated(with_weights(d, weights))


def push_weights_to_boundary(t: SurfaceDiagram) -> SurfaceDiagram:
    """Shift every interior weight along its arc onto the arc's last edge."""
    if not is_arc_only(t):
        raise PreconditionError("weights can only be pushed to the boundary on arc-only disk tangles")
    m = t.map
    out = t
    for p in m.boundary_darts:
        darts = _strand_from(m, p)
        if m.mate[darts[-1]] < p:
            continue
        for h in darts[1:]:
            out = shift_through(out, m.opposite(h))
    return out


def _strand_from(m, p: int) -> list[int]:
    darts = [p]
    while m.is_crossing_dart(m.mate[darts[-1]]):
        darts.append(m.opposite(m.mate[darts[-1]]))
    return darts


def is_arc_only(d: SurfaceDiagram) -> bool:
    return d.is_disk and len(d.map.component_edges) == len(d.boundary) // 2


def arc_tangle_check(t: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    """Arc-only tangles: twisted homology equals the untwisted homology of the pushed diagram."""
    pushed = push_weights_to_boundary(t)
    twisted = homology_report(t, "SK", max_crossings=max_crossings)
    ok, message = compare_reports(twisted, homology_report(pushed, "SK", max_crossings=max_crossings))
    if not ok:
        return False, f"pushing weights to the boundary changed SK homology: {message}"
    ok, message = compare_reports(twisted, untwisted_homology(pushed, max_crossings=max_crossings))
    if not ok:
        return False, f"twisted and untwisted homology differ: {message}"
    return True, f"arc-only tangle: twisted homology matches untwisted ({message})"


def jaeger_invariance_check(d: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    """Shift a fresh variable past every crossing in turn; CT dims must not move."""
    base = homology_report(d, "CT", max_crossings=max_crossings)
    m = d.map
    for i in range(d.n):
        k = m.edge_of[4 * i]
        if m.is_crossing_dart(m.mate[4 * i]) and m.mate[4 * i] // 4 == i:
            continue
        shifted = jaeger_shift(d, k, i, PolyGF2.var(fresh_variable(d)))
        ok, message = compare_reports(base, homology_report(shifted, "CT", max_crossings=max_crossings))
        if not ok:
            return False, f"shift of edge {d.edges[k].id!r} past {d.crossings[i].id!r}: {message}"
    return True, f"weight shifts past all {d.n} crossings preserve homology"


# ---------------------------------------------------------------------------
# Reidemeister moves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MoveSpec:
    """A move and where to make it.

    site by kind:
      R1+ / R1-    (edge id, "left" | "right")    side of the edge, ends[0] -> ends[1]
      R2           (half-edge, half-edge, "over" | "under")
                   two half-edges with the same cell on their left; the first
                   one's strand is pushed over (or under) the second's
      R3           (half-edge of a triangle face,)
      R1-inverse   (crossing id,)
      R2-inverse   (half-edge of a bigon face,)
    """
    kind: str
    site: tuple[str, ...]
    fresh_start: int | None = None

    def render(self) -> str:
        return f"{self.kind}@{','.join(self.site)}"


Paths = dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class EdgeTransport:
    """Chain map from the edges of `source` to those of `target`.

    `paths` gives a source edge id as the darts of a target path, walked from
    the edge's first end to its second. Any other source edge is in the
    target with the same id and ends. The smaller diagram is always the
    source; `backward` is set when that is the diagram after the move.
    """
    source: SurfaceDiagram
    target: SurfaceDiagram
    paths: Paths = field(default_factory=dict)
    backward: bool = False

    def chain(self, v: Sequence[int]) -> list[int]:
        tm = self.target.map
        index = {e.id: k for k, e in enumerate(self.target.edges)}
        out = [0] * len(self.target.edges)
        for k, c in enumerate(v):
            if not c:
                continue
            e = self.source.edges[k]
            route = self.paths.get(e.id)
            if route is None:
                out[index[e.id]] += c
                continue
            for name in route:
                h = tm.index[name]
                out[tm.edge_of[h]] += c * tm.edge_sign[h]
        return out

    def key(self, key: tuple[int, ...]) -> tuple[int, ...]:
        return sign_canonical(self.chain(key), class_lattice(self.target))

    def glyph(self, g: GlyphKey) -> GlyphKey:
        labels: dict[tuple[int, ...], int] = {}
        for key, label in g.entries:
            moved = self.key(key)
            labels[moved] = labels.get(moved, 0) + label
        entries = tuple(sorted((key, label) for key, label in labels.items() if label))
        return GlyphKey(entries, g.matching, g.colored_chi)

    def report(self, report: HomologyReport) -> HomologyReport:
        """`report` (of the source) with its glyphs written in target coordinates."""
        if self.source.mode != "closed":
            return report
        dims: dict[GlyphKey, Counter] = {}
        chains: dict[GlyphKey, Counter] = {}
        for s in report.sectors:
            g = self.glyph(s.glyph)
            dims.setdefault(g, Counter()).update(s.dims)
            chains.setdefault(g, Counter()).update(s.chain_dims)
        sectors = tuple(SectorDims(g, dict(dims[g]), dict(chains[g])) for g in dims)
        return replace(report, sectors=sectors)

    def align(self, before: HomologyReport, after: HomologyReport) -> tuple[HomologyReport, HomologyReport]:
        """Both reports with glyphs in the larger diagram's coordinates."""
        if self.backward:
            return before, self.report(after)
        return self.report(before), after


def track_reidemeister(d: SurfaceDiagram, move: MoveSpec) -> tuple[SurfaceDiagram, EdgeTransport]:
    """apply_reidemeister, plus the transport between d and the moved diagram."""
    if move.kind not in MOVE_KINDS:
        raise PreconditionError(f"unknown move {move.kind!r}; expected one of {', '.join(MOVE_KINDS)}")
    fresh = move.fresh_start if move.fresh_start is not None else fresh_variable(d)
    if move.kind in ("R1+", "R1-"):
        moved, paths = _r1(d, move, fresh)
    elif move.kind == "R2":
        moved, paths = _r2(d, move, fresh)
    elif move.kind == "R3":
        moved, paths = _r3(d, move)
    elif move.kind == "R1-inverse":
        moved, paths = _r1_inverse(d, move)
        return moved, EdgeTransport(moved, d, paths, backward=True)
    else:
        moved, paths = _r2_inverse(d, move)
        return moved, EdgeTransport(moved, d, paths, backward=True)
    return moved, EdgeTransport(d, moved, paths)


def apply_reidemeister(d: SurfaceDiagram, move: MoveSpec) -> SurfaceDiagram:
    return track_reidemeister(d, move)[0]


def _r1(d: SurfaceDiagram, move: MoveSpec, fresh: int) -> tuple[SurfaceDiagram, Paths]:
    if not move.site:
        raise PreconditionError(f"{move.kind} needs an edge id")
    k = _edge_index(d, move.site[0])
    side = move.site[1] if len(move.site) > 1 else "left"
    if side not in ("left", "right"):
        raise PreconditionError(f"R1 side must be left or right, got {side!r}")
    e = d.edges[k]
    namer = _Namer(d)
    cid = namer.fresh(f"k_{e.id}")
    a, b, c, dd = (namer.fresh(f"{cid}.{p}") for p in "abcd")
    if move.kind == "R1+":
        loop = (a, b)
        into, out = (c, dd) if side == "left" else (dd, c)
    else:
        loop = (dd, a)
        into, out = (b, c) if side == "left" else (c, b)
    loop_id, out_id = namer.fresh(f"{e.id}_loop"), namer.fresh(f"{e.id}_out")
    edges = list(d.edges)
    edges[k] = Edge(e.id, (e.ends[0], into), e.weight)
    edges.insert(k + 1, Edge(loop_id, loop, PolyGF2.var(fresh)))
    edges.insert(k + 2, Edge(out_id, (out, e.ends[1]), PolyGF2.var(fresh + 1)))
    crossings = d.crossings + (Crossing(cid, (a, b, c, dd)),)
    moved = _rebuild(d, crossings=crossings, edges=edges, added={e.id: [loop_id, out_id]})
    return moved, {e.id: (e.ends[0], out)}


def _r2_site_error(d: SurfaceDiagram, h1: int, h2: int) -> str | None:
    m = d.map
    if m.edge_of[h1] == m.edge_of[h2]:
        return "R2 needs two different edges"
    if m.cell_of[h1] != m.cell_of[h2]:
        return "R2 half-edges do not border the same cell"
    cell = m.cells[m.cell_of[h1]]
    if cell.kind == "group":
        return "R2 inside a face group is not supported"
    return None


def _r2(d: SurfaceDiagram, move: MoveSpec, fresh: int) -> tuple[SurfaceDiagram, Paths]:
    if len(move.site) < 2:
        raise PreconditionError("R2 needs two half-edges")
    h1, h2 = _dart(d, move.site[0]), _dart(d, move.site[1])
    over = (move.site[2] if len(move.site) > 2 else "over") == "over"
    error = _r2_site_error(d, h1, h2)
    if error:
        raise PreconditionError(error)
    m = d.map
    k1, k2 = m.edge_of[h1], m.edge_of[h2]
    n1, n2 = m.names[h1], m.names[h2]
    g1, g2 = m.names[m.mate[h1]], m.names[m.mate[h2]]
    namer = _Namer(d)
    y = namer.fresh("r2y")
    z = namer.fresh("r2z")
    ye, yn, yw, ys = (namer.fresh(f"{y}.{p}") for p in "ENWS")
    ze, zn, zw, zs = (namer.fresh(f"{z}.{p}") for p in "ENWS")
    # the pushed strand runs S -> N through y and N -> S through z
    if over:
        cy, cz = (ye, yn, yw, ys), (ze, zn, zw, zs)
    else:
        cy, cz = (yn, yw, ys, ye), (zn, zw, zs, ze)
    e1, e2 = d.edges[k1], d.edges[k2]
    ids = [namer.fresh(f"{e1.id}_top"), namer.fresh(f"{e1.id}_tail"),
           namer.fresh(f"{e2.id}_mid"), namer.fresh(f"{e2.id}_tail")]
    replaced = {
        k1: [Edge(e1.id, (n1, ys), e1.weight),
             Edge(ids[0], (yn, zn), PolyGF2.var(fresh)),
             Edge(ids[1], (zs, g1), PolyGF2.var(fresh + 1))],
        k2: [Edge(e2.id, (n2, ze), e2.weight),
             Edge(ids[2], (zw, ye), PolyGF2.var(fresh + 2)),
             Edge(ids[3], (yw, g2), PolyGF2.var(fresh + 3))],
    }
    edges = [x for k, e in enumerate(d.edges) for x in replaced.get(k, [e])]
    crossings = d.crossings + (Crossing(y, cy), Crossing(z, cz))
    moved = _rebuild(d, crossings=crossings, edges=edges,
                     added={e1.id: ids[:2], e2.id: ids[2:]})
    paths = {
        e1.id: (n1, yn, zs) if e1.ends[0] == n1 else (g1, zn, ys),
        e2.id: (n2, zw, yw) if e2.ends[0] == n2 else (g2, ye, ze),
    }
    return moved, paths


def _r3_site(d: SurfaceDiagram, h: int) -> tuple[list[int], str | None]:
    m = d.map
    face = m.faces[m.face_of[h]]
    walk = list(face.walk)
    if len(walk) != 3 or not all(m.is_crossing_dart(x) for x in walk):
        return walk, "R3 site is not a triangle face"
    if len({x // 4 for x in walk}) != 3:
        return walk, "R3 triangle must have three distinct crossings"
    cell = m.cells[m.cell_of[h]]
    if cell.punctured or cell.kind != "face":
        return walk, "R3 triangle is marked or grouped"
    tri = set().union(*(_crossing_darts(x // 4) for x in walk))
    for x in walk:
        for y in (m.opposite(x), m.opposite(m.mate[x])):
            if m.mate[y] in tri:
                return walk, "R3 triangle crossings are joined outside the triangle"
    if not any(x % 2 == 1 and m.mate[x] % 2 == 1 for x in walk):
        return walk, "no strand passes over both of its triangle crossings"
    return walk, None


def _r3(d: SurfaceDiagram, move: MoveSpec) -> tuple[SurfaceDiagram, Paths]:
    if not move.site:
        raise PreconditionError("R3 needs a half-edge of the triangle")
    walk, error = _r3_site(d, _dart(d, move.site[0]))
    if error:
        raise PreconditionError(error)
    m = d.map
    ends: dict[int, tuple[int, int]] = {}
    paths: Paths = {}
    for x in walk:
        xo = m.mate[x]
        ox, oy = m.opposite(x), m.opposite(xo)
        # each strand: its outer edges trade places, its outer half-edges close the new triangle
        ends[m.edge_of[x]] = (ox, oy)
        ends[m.edge_of[ox]] = (m.mate[ox], xo)
        ends[m.edge_of[oy]] = (m.mate[oy], x)
        # the strand now meets xo's crossing first; routes keep each old end's crossing
        routes = {
            x: (ox,), xo: (oy,),
            ox: (ox, xo), m.mate[ox]: (m.mate[ox], oy),
            oy: (oy, x), m.mate[oy]: (m.mate[oy], ox),
        }
        for k in (m.edge_of[x], m.edge_of[ox], m.edge_of[oy]):
            start = m.index[d.edges[k].ends[0]]
            paths[d.edges[k].id] = tuple(m.names[h] for h in routes[start])
    edges = []
    for k, e in enumerate(d.edges):
        if k in ends:
            u, v = ends[k]
            edges.append(Edge(e.id, (m.names[u], m.names[v]), e.weight))
        else:
            edges.append(e)
    moved = set().union(*(_crossing_darts(x // 4) for x in walk))
    return _rebuild(d, crossings=d.crossings, edges=edges, removed_darts=moved), paths


def _monogon(d: SurfaceDiagram, i: int) -> tuple[int, int] | None:
    m = d.map
    for x in sorted(_crossing_darts(i)):
        if m.mate[x] == m.ccw(x):
            return x, m.ccw(x)
    return None


def _r1_inverse_error(d: SurfaceDiagram, i: int) -> str | None:
    m = d.map
    loop = _monogon(d, i)
    if loop is None:
        return f"crossing {d.crossings[i].id!r} has no monogon"
    x, y = loop
    cell = m.cells[m.cell_of[x]]
    if cell.punctured or cell.kind != "face":
        return "R1-inverse monogon is marked or grouped"
    p, q = m.ccw(y), m.cw(x)
    if m.mate[p] in _crossing_darts(i):
        return "removing the kink would leave a crossingless closed component"
    return None


def _r1_inverse(d: SurfaceDiagram, move: MoveSpec) -> tuple[SurfaceDiagram, Paths]:
    if not move.site:
        raise PreconditionError("R1-inverse needs a crossing id")
    i = _crossing_index(d, move.site[0])
    error = _r1_inverse_error(d, i)
    if error:
        raise PreconditionError(error)
    m = d.map
    x, y = _monogon(d, i)
    p, q = m.ccw(y), m.cw(x)
    kp, kq, kl = m.edge_of[p], m.edge_of[q], m.edge_of[x]
    merged = Edge(
        d.edges[kp].id, (m.names[m.mate[p]], m.names[m.mate[q]]),
        d.edges[kp].weight + d.edges[kq].weight + d.edges[kl].weight)
    edges = [merged if k == kp else e for k, e in enumerate(d.edges) if k not in (kq, kl)]
    crossings = tuple(c for j, c in enumerate(d.crossings) if j != i)
    moved = _rebuild(d, crossings=crossings, edges=edges, removed_darts=_crossing_darts(i))
    # paths run in d, from the merged edge's first end through the removed crossing
    return moved, {merged.id: (m.names[m.mate[p]], m.names[q])}


def _bigon(d: SurfaceDiagram, h: int) -> tuple[tuple[int, int] | None, str | None]:
    m = d.map
    face = m.faces[m.face_of[h]]
    if len(face.walk) != 2 or not all(m.is_crossing_dart(x) for x in face.walk):
        return None, "R2-inverse site is not a bigon face"
    p, q = face.walk
    if p // 4 == q // 4:
        return None, "R2-inverse bigon has a single crossing"
    cell = m.cells[m.cell_of[p]]
    if cell.punctured or cell.kind != "face":
        return None, "R2-inverse bigon is marked or grouped"
    if p % 2 != m.mate[p] % 2:
        return None, "R2-inverse bigon strands alternate; that is not an R2 bigon"
    both = _crossing_darts(p // 4) | _crossing_darts(q // 4)
    for x in (p, m.mate[p], q, m.mate[q]):
        if m.mate[m.opposite(x)] in both:
            return None, "R2-inverse bigon crossings are joined outside the bigon"
    return (p, q), None


def _r2_inverse(d: SurfaceDiagram, move: MoveSpec) -> tuple[SurfaceDiagram, Paths]:
    if not move.site:
        raise PreconditionError("R2-inverse needs a half-edge of the bigon")
    pair, error = _bigon(d, _dart(d, move.site[0]))
    if error:
        raise PreconditionError(error)
    m = d.map
    drop: set[int] = set()
    merged: dict[int, Edge] = {}
    paths: Paths = {}
    for x in pair:
        xo = m.mate[x]
        a, b = m.opposite(x), m.opposite(xo)
        ka, kb, kx = m.edge_of[a], m.edge_of[b], m.edge_of[x]
        merged[ka] = Edge(
            d.edges[ka].id, (m.names[m.mate[a]], m.names[m.mate[b]]),
            d.edges[ka].weight + d.edges[kx].weight + d.edges[kb].weight)
        paths[d.edges[ka].id] = (m.names[m.mate[a]], m.names[x], m.names[b])
        drop |= {kb, kx}
    edges = [merged.get(k, e) for k, e in enumerate(d.edges) if k not in drop]
    gone = {x // 4 for x in pair}
    crossings = tuple(c for j, c in enumerate(d.crossings) if j not in gone)
    removed = set().union(*(_crossing_darts(j) for j in gone))
    return _rebuild(d, crossings=crossings, edges=edges, removed_darts=removed), paths


def admissible_moves(d: SurfaceDiagram) -> list[MoveSpec]:
    """Every move apply_reidemeister accepts on d, in a deterministic order."""
    m = d.map
    moves = []
    for e in d.edges:
        for kind in ("R1+", "R1-"):
            for side in ("left", "right"):
                moves.append(MoveSpec(kind, (e.id, side)))
    for cell in m.cells:
        for h1, h2 in itertools.permutations(cell.darts, 2):
            if _r2_site_error(d, h1, h2) is None:
                for how in ("over", "under"):
                    moves.append(MoveSpec("R2", (m.names[h1], m.names[h2], how)))
    for face in m.faces:
        if len(face.walk) == 3 and _r3_site(d, face.walk[0])[1] is None:
            moves.append(MoveSpec("R3", (m.names[face.walk[0]],)))
        if len(face.walk) == 2 and _bigon(d, face.walk[0])[1] is None:
            moves.append(MoveSpec("R2-inverse", (m.names[face.walk[0]],)))
    for i, c in enumerate(d.crossings):
        if _r1_inverse_error(d, i) is None:
            moves.append(MoveSpec("R1-inverse", (c.id,)))
    return moves


def reidemeister_check(d: SurfaceDiagram, rng: random.Random, trials: int, *,
                       which: str = "CT", max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    from diagram_gen import random_move

    base = homology_report(d, which, max_crossings=max_crossings)
    ran = skipped = 0
    for trial in range(trials):
        move = random_move(d, rng)
        moved, transport = track_reidemeister(d, move)
        if moved.n > max_crossings:
            skipped += 1
            continue
        after = homology_report(moved, which, max_crossings=max_crossings)
        ok, message = compare_reports(*transport.align(base, after))
        ran += 1
        if not ok:
            return False, f"trial {trial}, move {move.render()}: {message}"
    if trials and not ran:
        raise PreconditionError(f"all {trials} random moves went past {max_crossings} crossings")
    summary = f"{ran} random moves preserve homology"
    if skipped:
        summary += f" ({skipped} skipped above {max_crossings} crossings)"
    return True, summary


def move_invariance_check(d: SurfaceDiagram, move: MoveSpec, *, which: str = "CT",
                          max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    """One move; glyphs are compared after carrying class keys across it."""
    moved, transport = track_reidemeister(d, move)
    before = homology_report(d, which, max_crossings=max_crossings)
    after = homology_report(moved, which, max_crossings=max_crossings)
    ok, message = compare_reports(*transport.align(before, after))
    return ok, f"{move.render()}: {message}"


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------

def _planar_precondition(d: SurfaceDiagram) -> None:
    if d.mode != "planar":
        raise PreconditionError(f"signature needs a planar link diagram, got mode {d.mode!r}")


def goeritz_signature(d: SurfaceDiagram) -> int:
    """Signature of the link in R^3 from the white Goeritz matrix and the correction term."""
    _planar_precondition(d)
    coloring = checkerboard(d)
    m = d.map
    _, _, signs = crossing_signs(d)
    white = [c.id for c in m.cells if not coloring.is_black(c.id)]
    pos = {cid: j for j, cid in enumerate(white)}
    g = [[0] * len(white) for _ in white]
    mu = 0
    for i in range(d.n):
        convention = coloring.convention[i]
        eta = -1 if convention else 1
        wa, wb = ((4 * i + 1, 4 * i + 3) if convention else (4 * i, 4 * i + 2))
        u, v = pos[m.cell_of[wa]], pos[m.cell_of[wb]]
        if u != v:
            g[u][v] -= eta
            g[v][u] -= eta
        # the oriented smoothing is the 0-smoothing at positive crossings
        if (signs[i] < 0) == convention:
            mu += eta
    for u in range(len(white)):
        g[u][u] = -sum(g[u][v] for v in range(len(white)) if v != u)
    reduced = [row[1:] for row in g[1:]]
    return _matrix_signature(reduced) - mu


def _matrix_signature(rows: list[list[int]]) -> int:
    if not rows:
        return 0
    x = symbols("x")
    coeffs = [int(c) for c in Matrix(rows).charpoly(x).all_coeffs()]
    # every root is real: Descartes' rule counts them exactly
    positive = _sign_changes(coeffs)
    negative = _sign_changes([c * (-1) ** (len(coeffs) - 1 - j) for j, c in enumerate(coeffs)])
    return positive - negative


def _sign_changes(coeffs: list[int]) -> int:
    nonzero = [c for c in coeffs if c]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if (a > 0) != (b > 0))


def _alternating_precondition(d: SurfaceDiagram) -> None:
    if not is_alternating(d):
        raise PreconditionError("diagram is not alternating")
    if not surface_profile(d).colorable:
        raise PreconditionError("diagram cannot be checkerboard colored")
    if not checkerboard(d).convention_ok:
        raise PreconditionError("no coloring has 1-smoothings merging black at every crossing")


def signature_alternating(d: SurfaceDiagram) -> int:
    """#black regions - 1 - n_plus for a connected alternating planar diagram."""
    _planar_precondition(d)
    _alternating_precondition(d)
    coloring = checkerboard(d)
    black = sum(1 for c in d.map.cells if coloring.is_black(c.id))
    return black - 1 - n_plus_of(d)


# ---------------------------------------------------------------------------
# Alternating verdicts
# ---------------------------------------------------------------------------

def _infinity_cell(d: SurfaceDiagram):
    for cell in d.map.cells:
        if cell.infinity:
            return cell
    raise PreconditionError("an infinity face must be marked for the punctured-plane laws")


def annular_alternating_check(d: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    _planar_precondition(d)
    _alternating_precondition(d)
    inner = [c for c in d.map.cells if c.punctured and not c.infinity]
    if len(inner) != 1:
        raise PreconditionError(f"annular check needs exactly one puncture besides infinity, got {len(inner)}")
    sigma = signature_alternating(d)
    unbounded_black = checkerboard(d).is_black(_infinity_cell(d).id)
    report = homology_report(d, "CT", max_crossings=max_crossings)
    for s in report.nonzero():
        k = s.glyph.k
        if k % 2:
            target = sigma
        else:
            target = sigma - 1 if unbounded_black else sigma + 1
        for delta in s.dims:
            if delta + k != target:
                return False, (f"sector {s.glyph.render()}: delta + k = {delta + k}, expected {target} "
                               f"(sigma={sigma}, unbounded {'black' if unbounded_black else 'white'})")
    return True, f"annular grading law holds on {len(report.nonzero())} sectors (sigma={sigma})"


def punctured_plane_check(d: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    """delta = sigma - k - chi(B) - m_B + J on every nonzero colored sector."""
    _planar_precondition(d)
    _alternating_precondition(d)
    coloring = checkerboard(d)
    sigma = signature_alternating(d)
    j = 0 if coloring.is_black(_infinity_cell(d).id) else 1
    m_b = sum(1 for c in d.map.cells if c.punctured and not c.infinity and coloring.is_black(c.id))
    report = homology_report(d, "CT", colored=True, max_crossings=max_crossings)
    for s in report.nonzero():
        target = sigma - s.glyph.k - s.glyph.colored_chi - m_b + j
        for delta in s.dims:
            if delta != target:
                return False, (f"sector {s.glyph.render()}: delta {delta}, expected {target} "
                               f"(sigma={sigma}, m_B={m_b}, J={j})")
    return True, f"punctured-plane law holds on {len(report.nonzero())} colored sectors"


def alternating_theorem_check(d: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    """Each colored CT sector sits in one homological grading with |r| + chi_B constant."""
    _alternating_precondition(d)
    sectors = build_all_ct(d, colored=True, max_crossings=max_crossings)
    constants = set()
    for key, c in sectors.items():
        heights = {s.h for gens in c.generators.values() for s in gens}
        if len(heights) > 1:
            return False, f"colored sector {key.render()} spans homological gradings {sorted(heights)}"
        if not c.is_zero():
            return False, f"colored sector {key.render()} has a nonzero differential"
        constants |= {h + key.colored_chi for h in heights}
    if len(constants) > 1:
        return False, f"|r| + chi_B takes values {sorted(constants)}"
    return True, f"{len(sectors)} colored sectors, each in a single grading"


# ---------------------------------------------------------------------------
# Completion of alternating disk tangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndLabel:
    flow: str      # "+" the strand leaves the disk here, "-" it enters
    strand: str    # "u": go under at the next crossing outside, "o": over


def end_labels(t: SurfaceDiagram) -> list[EndLabel]:
    m = t.map
    labels = []
    for p in m.boundary_darts:
        inner = m.mate[p]
        if not m.is_crossing_dart(inner):
            raise PreconditionError(f"boundary point {m.names[p]!r} is on a crossingless arc")
        if not m.direction[m.edge_of[p]]:
            raise PreconditionError(f"boundary point {m.names[p]!r} is on an unoriented strand")
        labels.append(EndLabel("-" if m.forward(p) else "+", "u" if inner % 2 else "o"))
    return labels


def complete_alternating_tangle(t: SurfaceDiagram) -> SurfaceDiagram:
    """Close a connected alternating disk tangle into an alternating link on the sphere."""
    if not t.is_disk:
        raise PreconditionError("completion needs a disk tangle")
    _alternating_precondition(t)
    m = t.map
    labels = end_labels(t)
    for j, lab in enumerate(labels):
        if lab.strand == labels[(j + 1) % len(labels)].strand:
            raise PreconditionError(
                f"u/o labels do not alternate at boundary points {m.names[m.boundary_darts[j]]!r} "
                "and the next one; some region is not a disk")

    ends = list(range(len(labels)))
    joins: list[tuple[int, int]] = []
    while ends:
        for pos, j in enumerate(ends):
            nxt = ends[(pos + 1) % len(ends)]
            if labels[j].flow == "+" and labels[nxt].flow == "-":
                joins.append((j, nxt))
                ends = [x for x in ends if x not in (j, nxt)]
                break
        else:
            raise PreconditionError("boundary flows do not pair up")

    bd = m.boundary_darts
    drop: set[int] = set()
    merged: dict[int, Edge] = {}
    for j, nxt in joins:
        p, q = bd[j], bd[nxt]
        kp, kq = m.edge_of[p], m.edge_of[q]
        merged[kp] = Edge(
            t.edges[kp].id, (m.names[m.mate[p]], m.names[m.mate[q]]),
            t.edges[kp].weight + t.edges[kq].weight)
        drop.add(kq)
    edges = tuple(merged.get(k, e) for k, e in enumerate(t.edges) if k not in drop)

    bare = validated(SurfaceDiagram(mode="planar", crossings=t.crossings, edges=edges))
    bm = bare.map
    components = []
    for strand in bm.component_edges:
        ids = tuple(edges[k].id for k in strand)
        start = next(
            (bm.names[h] for h in range(4 * bare.n)
             if bm.edge_of[h] in strand and m.forward(m.index[bm.names[h]])), None)
        components.append(Component(ids, start))
    return validated(replace(bare, components=tuple(components)))


def disk_tangle_check(t: SurfaceDiagram, *, max_crossings: int = DEFAULT_MAX_CROSSINGS) -> Verdict:
    """delta = sigma(L) - chi(B of the glued decomposition) + 1 for every CT generator."""
    link = complete_alternating_tangle(t)
    sigma = signature_alternating(link)
    link_coloring = checkerboard(link)
    n_plus = n_plus_of(t)
    sectors = build_all_ct(t, colored=True, max_crossings=max_crossings)
    checked = 0
    for key, c in sectors.items():
        for delta, gens in c.generators.items():
            for s in gens:
                chi = state_color_chi(link, link_coloring, resolve(link, s.code))[0]
                if delta_grading(s, n_plus) != sigma - chi + 1:
                    return False, (f"generator {s.label()} in {key.render()}: delta {delta}, "
                                   f"expected {sigma - chi + 1} (sigma={sigma}, chi={chi})")
                checked += 1
    return True, f"disk-tangle grading law holds on {checked} generators (sigma={sigma})"
