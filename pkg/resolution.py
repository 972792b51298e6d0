"""
Resolutions of a surface diagram: smoothing, curve tracing, complementary
regions, contractibility, isotopy grouping and glyphs.

Smoothing at crossing (a, b, c, d), a-c the under-strand:

  code 0   arcs a-b and c-d; corners a and c are cut off, the band between
           the arcs joins corners b and d
  code 1   arcs a-d and b-c; corners d and b are cut off, the band joins
           corners a and c

Region analysis cuts the surface along a chosen set S of curves and glues
everything else back: cells (see surface_diagram) and one band per crossing
are the pieces, united across every edge and smoothing arc not in S. The
Euler characteristic of a region is

  sum of cell chi  - bands  - edges not in S  - arcs not in S  + ports

where a port is a crossing half-edge on a curve not in S (the point where
an edge gluing meets an arc gluing). Genus then follows from
chi + punctures = 2 - 2g - b.
"""
from __future__ import annotations

import itertools
import sys
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from networkx.utils import UnionFind

from gf2fun import IntLattice, PolyGF2, sign_canonical
from surface_diagram import CombinatorialMap, Coloring, DiagramError, SurfaceDiagram

Code = tuple[int, ...]

_ZERO_PARTNER = (1, 0, 3, 2)
_ONE_PARTNER = (3, 2, 1, 0)


def partner(h: int, bit: int) -> int:
    """The half-edge joined to crossing dart h by the smoothing `bit`."""
    p = h % 4
    return h - p + (_ONE_PARTNER if bit else _ZERO_PARTNER)[p]


def smoothing_arcs(i: int, bit: int) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """The two arcs at crossing i as (half-edge, half-edge, cut-off corner)."""
    a, b, c, d = (4 * i + p for p in range(4))
    if bit == 0:
        return (a, b, a), (c, d, c)
    return (d, a, d), (b, c, b)


def band_corners(i: int, bit: int) -> tuple[int, int]:
    base = 4 * i
    return (base + 1, base + 3) if bit == 0 else (base, base + 2)


def all_codes(n: int) -> list[Code]:
    return list(itertools.product((0, 1), repeat=n))


def normalize_code(d: SurfaceDiagram, code) -> Code:
    """Accept a tuple of bits, a "0110" string or a {crossing id: bit} map."""
    if isinstance(code, str):
        code = [int(ch) for ch in code]
    elif isinstance(code, dict):
        code = [int(code[c.id]) for c in d.crossings]
    code = tuple(int(b) for b in code)
    if len(code) != d.n or any(b not in (0, 1) for b in code):
        raise ValueError(f"resolution code {code} does not assign 0/1 to all {d.n} crossings")
    return code


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    darts: tuple[int, ...]          # outgoing darts in traversal order
    edges: frozenset
    is_arc: bool = False
    ends: tuple[int, int] | None = None   # boundary point indices of an arc


@dataclass(frozen=True)
class Resolution:
    code: Code
    circles: tuple[Curve, ...]
    arcs: tuple[Curve, ...] = ()

    @property
    def weight_index(self) -> int:
        return sum(self.code)

    @property
    def curves(self) -> tuple[Curve, ...]:
        return self.circles + self.arcs

    def curve_of_edge(self) -> dict[int, int]:
        return {k: ci for ci, curve in enumerate(self.curves) for k in curve.edges}


@dataclass(frozen=True)
class CircleInfo:
    contractible: bool
    weight: PolyGF2
    class_key: tuple[int, ...]
    isotopy_group: int | None = None


@dataclass(frozen=True)
class RegionProfile:
    cells: frozenset
    band_count: int
    punctures: int
    boundary_circles: tuple[tuple[int, int], ...]
    euler_char: int
    genus: int
    frame: bool = False         # touches the outer circle of a disk tangle

    @property
    def boundary_count(self) -> int:
        return sum(m for _, m in self.boundary_circles) + (1 if self.frame else 0)


@dataclass(frozen=True)
class GlyphKey:
    entries: tuple[tuple[tuple[int, ...], int], ...] = ()
    matching: tuple[tuple[int, int], ...] = ()
    colored_chi: int | None = None

    @property
    def k(self) -> int:
        return sum(label for _, label in self.entries)

    def negated(self) -> GlyphKey:
        return GlyphKey(
            tuple(sorted((key, -label) for key, label in self.entries)),
            self.matching, self.colored_chi)

    def uncolored(self) -> GlyphKey:
        return GlyphKey(self.entries, self.matching, None)

    def to_json(self) -> list:
        return [[list(key), label] for key, label in self.entries]

    def render(self) -> str:
        if not self.entries:
            text = "trivial"
        else:
            text = " ".join(f"{label:+d}{_render_key(key)}" for key, label in self.entries)
        if self.matching:
            text += " | " + " ".join(f"{a}-{b}" for a, b in self.matching)
        if self.colored_chi is not None:
            text += f" [chi_B={self.colored_chi}]"
        return text


def _render_key(key: tuple[int, ...]) -> str:
    return "g(" + ",".join(str(x) for x in key) + ")"


@dataclass
class ResolutionData:
    """Everything the complexes need about one resolution, computed once."""
    resolution: Resolution
    infos: list[CircleInfo]
    classes: list[list[int]]
    curve_of_edge: dict[int, int] = field(default_factory=dict)

    @property
    def contractible(self) -> list[int]:
        return [i for i, info in enumerate(self.infos) if info.contractible]

    @property
    def noncontractible(self) -> list[int]:
        return [i for i, info in enumerate(self.infos) if not info.contractible]


# ---------------------------------------------------------------------------
# Tracing
# ---------------------------------------------------------------------------

def resolve(d: SurfaceDiagram, code) -> Resolution:
    code = normalize_code(d, code)
    m = d.map
    seen = [False] * len(m.names)
    boundary_index = {h: j for j, h in enumerate(m.boundary_darts)}

    arcs = []
    for p in m.boundary_darts:
        if seen[p]:
            continue
        darts = []
        h = p
        while True:
            seen[h] = seen[m.mate[h]] = True
            darts.append(h)
            arrive = m.mate[h]
            if not m.is_crossing_dart(arrive):
                break
            h = partner(arrive, code[arrive // 4])
        ends = (boundary_index[p], boundary_index[m.mate[darts[-1]]])
        arcs.append(Curve(tuple(darts), frozenset(m.edge_of[x] for x in darts), True, ends))

    circles = []
    for start in range(4 * d.n):
        if seen[start]:
            continue
        darts = []
        h = start
        while True:
            seen[h] = seen[m.mate[h]] = True
            darts.append(h)
            arrive = m.mate[h]
            h = partner(arrive, code[arrive // 4])
            if h == start:
                break
        circles.append(Curve(tuple(darts), frozenset(m.edge_of[x] for x in darts)))
    return Resolution(code, tuple(circles), tuple(arcs))


def edge_vector(m: CombinatorialMap, curve: Curve, n_edges: int) -> list[int]:
    return m.face_vector(curve.darts, n_edges)


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

def regions(d: SurfaceDiagram, code, subset: Iterable[int], r: Resolution | None = None) -> list[RegionProfile]:
    """Complementary regions of the curves in `subset` (indices into r.curves)."""
    code = normalize_code(d, code)
    r = r or resolve(d, code)
    m = d.map
    cut = set(subset)
    curve_of = r.curve_of_edge()

    def in_cut(h: int) -> bool:
        return curve_of[m.edge_of[h]] in cut

    uf = UnionFind()
    for cell in m.cells:
        uf[("cell", cell.id)]
    for i in range(d.n):
        band = ("band", i)
        uf[band]
        for g in band_corners(i, code[i]):
            uf.union(band, ("cell", m.cell_of[g]))
        for x, _y, corner in smoothing_arcs(i, code[i]):
            if not in_cut(x):
                uf.union(band, ("cell", m.cell_of[corner]))
    for k in range(len(d.edges)):
        h = _dart_of_edge(m, k)
        if curve_of[k] not in cut:
            uf.union(("cell", m.cell_of[h]), ("cell", m.cell_of[m.mate[h]]))

    chi: dict = {}
    cells_of: dict = {}
    bands: dict = {}
    punct: dict = {}
    frame: dict = {}
    for cell in m.cells:
        root = uf[("cell", cell.id)]
        chi[root] = chi.get(root, 0) + cell.chi
        cells_of.setdefault(root, set()).add(cell.id)
        punct[root] = punct.get(root, 0) + (1 if cell.punctured else 0)
        if cell.kind == "sector":
            frame[root] = True
    for i in range(d.n):
        root = uf[("band", i)]
        chi[root] -= 1
        bands[root] = bands.get(root, 0) + 1
        for x, _y, _corner in smoothing_arcs(i, code[i]):
            if not in_cut(x):
                chi[root] -= 1
    for k in range(len(d.edges)):
        if curve_of[k] not in cut:
            chi[uf[("cell", m.cell_of[_dart_of_edge(m, k)])]] -= 1
    for h in range(4 * d.n):
        if not in_cut(h):
            chi[uf[("cell", m.cell_of[h])]] += 1

    boundary: dict = {}
    for ci in sorted(cut):
        k = next(iter(r.curves[ci].edges))
        h = _dart_of_edge(m, k)
        r1, r2 = uf[("cell", m.cell_of[h])], uf[("cell", m.cell_of[m.mate[h]])]
        if r1 == r2:
            boundary.setdefault(r1, []).append((ci, 2))
        else:
            boundary.setdefault(r1, []).append((ci, 1))
            boundary.setdefault(r2, []).append((ci, 1))

    out = []
    for root in sorted(cells_of, key=lambda rt: min(cells_of[rt])):
        bc = tuple(boundary.get(root, ()))
        b = sum(mult for _, mult in bc) + (1 if frame.get(root) else 0)
        if d.is_disk:
            genus = 0
        else:
            twice = 2 - b - chi[root] - punct[root]
            if twice < 0 or twice % 2:
                raise DiagramError(f"inconsistent region: chi={chi[root]} b={b} p={punct[root]}")
            genus = twice // 2
        out.append(RegionProfile(
            cells=frozenset(cells_of[root]), band_count=bands.get(root, 0),
            punctures=punct[root], boundary_circles=bc, euler_char=chi[root],
            genus=genus, frame=bool(frame.get(root))))
    return out


def _dart_of_edge(m: CombinatorialMap, k: int) -> int:
    return _edge_darts(m)[k]


_edge_dart_cache: "weakref.WeakKeyDictionary[CombinatorialMap, list[int]]" = weakref.WeakKeyDictionary()


def _edge_darts(m: CombinatorialMap) -> list[int]:
    cached = _edge_dart_cache.get(m)
    if cached is None:
        cached = [0] * (max(m.edge_of) + 1 if m.edge_of else 0)
        for h in reversed(range(len(m.names))):
            cached[m.edge_of[h]] = h
        _edge_dart_cache[m] = cached
    return cached


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

_lattice_cache: "weakref.WeakKeyDictionary[CombinatorialMap, IntLattice]" = weakref.WeakKeyDictionary()


def class_lattice(d: SurfaceDiagram) -> IntLattice:
    """Boundaries of unmarked cells: edge cycles modulo these give H1."""
    m = d.map
    lat = _lattice_cache.get(m)
    if lat is None:
        n_edges = len(d.edges)
        gens = [m.face_vector(c.darts, n_edges) for c in m.cells if not c.punctured]
        lat = IntLattice.from_generators(gens, n_edges)
        _lattice_cache[m] = lat
    return lat


def _is_disk_region(reg: RegionProfile, ci: int) -> bool:
    return (reg.euler_char == 1 and reg.punctures == 0 and not reg.frame
            and reg.boundary_circles == ((ci, 1),))


def classify_circles(d: SurfaceDiagram, r: Resolution) -> list[CircleInfo]:
    m = d.map
    infos = []
    for ci, circle in enumerate(r.circles):
        if d.is_disk:
            contractible = True
            regs: list[RegionProfile] = []
        else:
            regs = regions(d, r.code, {ci}, r)
            contractible = any(_is_disk_region(reg, ci) for reg in regs)
        if contractible:
            weight = PolyGF2.zero()
            for k in circle.edges:
                weight = weight + d.edges[k].weight
            infos.append(CircleInfo(True, weight, ()))
            continue
        if d.mode == "planar":
            infos.append(CircleInfo(False, PolyGF2.zero(), _enclosed_punctures(d, regs)))
        else:
            vec = edge_vector(m, circle, len(d.edges))
            infos.append(CircleInfo(False, PolyGF2.zero(), sign_canonical(vec, class_lattice(d))))
    return infos


def _enclosed_punctures(d: SurfaceDiagram, regs: list[RegionProfile]) -> tuple[int, ...]:
    m = d.map
    inside = []
    for reg in regs:
        if any(m.cells[c].infinity for c in reg.cells):
            continue
        inside.extend(m.cells[c].puncture_index for c in reg.cells if m.cells[c].puncture_index)
    return tuple(sorted(inside))


def isotopy_classes(d: SurfaceDiagram, r: Resolution, infos: Sequence[CircleInfo] | None = None) -> list[list[int]]:
    """Partition the noncontractible circles by cobounding puncture-free annuli."""
    infos = infos if infos is not None else classify_circles(d, r)
    essential = [i for i, info in enumerate(infos) if not info.contractible]
    if not essential:
        return []
    uf = UnionFind(essential)
    for reg in regions(d, r.code, essential, r):
        if (reg.euler_char == 0 and reg.genus == 0 and reg.punctures == 0 and not reg.frame
                and len(reg.boundary_circles) == 2
                and all(mult == 1 for _, mult in reg.boundary_circles)):
            (c1, _), (c2, _) = reg.boundary_circles
            uf.union(c1, c2)
    groups: dict[int, list[int]] = {}
    for i in essential:
        groups.setdefault(uf[i], []).append(i)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


_data_cache: "weakref.WeakKeyDictionary[CombinatorialMap, dict]" = weakref.WeakKeyDictionary()


def resolution_data(d: SurfaceDiagram, code) -> ResolutionData:
    """resolve + classify_circles + isotopy_classes, memoized per diagram."""
    code = normalize_code(d, code)
    per_map = _data_cache.setdefault(d.map, {})
    data = per_map.get(code)
    if data is None:
        r = resolve(d, code)
        infos = classify_circles(d, r)
        classes = isotopy_classes(d, r, infos)
        group_of = {c: gi for gi, g in enumerate(classes) for c in g}
        infos = [
            CircleInfo(info.contractible, info.weight, info.class_key, group_of.get(i))
            for i, info in enumerate(infos)]
        data = ResolutionData(r, infos, classes, r.curve_of_edge())
        per_map[code] = data
    return data


# ---------------------------------------------------------------------------
# Glyphs and colored Euler characteristic
# ---------------------------------------------------------------------------

_warned_trivial_key: set = set()


def glyph_of(d: SurfaceDiagram, r: Resolution, decorations: Sequence[int],
             data: ResolutionData | None = None) -> GlyphKey:
    """Glyph of a decorated resolution; decorations are +1/-1 per circle."""
    data = data or resolution_data(d, r.code)
    entries = []
    for group in data.classes:
        label = sum(decorations[c] for c in group)
        if label == 0:
            continue
        key = data.infos[group[0]].class_key
        if d.mode == "closed" and d.map.genus >= 2 and not any(key):
            _warn_trivial_key(d)
        entries.append((key, label))
    matching = tuple(sorted(tuple(sorted(a.ends)) for a in r.arcs))
    return GlyphKey(tuple(sorted(entries)), matching)


def _warn_trivial_key(d: SurfaceDiagram) -> None:
    tag = id(d.map)
    if tag in _warned_trivial_key:
        return
    _warned_trivial_key.add(tag)
    print("Warning: genus >= 2 surface has a nonzero-labeled circle class with trivial "
          "homology key; glyphs are compared by homology, which may merge non-isotopic "
          "separating curves", file=sys.stderr)


def state_color_chi(d: SurfaceDiagram, coloring: Coloring | None, r: Resolution) -> tuple[int, int]:
    """(chi of black regions, chi of white regions) of the full resolution."""
    if coloring is None:
        raise ValueError("state_color_chi needs a checkerboard coloring")
    regs = regions(d, r.code, range(len(r.curves)), r)
    black = white = 0
    for reg in regs:
        if coloring.is_black(min(reg.cells)):
            black += reg.euler_char
        else:
            white += reg.euler_char
    return black, white
