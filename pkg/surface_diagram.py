"""
Tangle diagrams on oriented surfaces, stored as rotation systems.

A diagram is a set of 4-valent crossings whose half-edges are listed in
counterclockwise order, glued in pairs by edges. Everything topological is
derived from that combinatorial map: faces, the surface (Euler
characteristic and genus), checkerboard colorings and crossing signs.

Internal numbering (stable, used by every other module):

  dart 4*i + p   half-edge at position p of crossing i, where positions are
                 rotated so that p = 0 and p = 2 are the under-strand
                 (a, b, c, d = 0, 1, 2, 3 counterclockwise)
  dart 4*n + j   boundary point j (disk-tangle mode), in declared order

  ccw(h) / cw(h) rotate around the crossing; a boundary point is fixed.
  The face to the left of dart h is traced by h -> cw(mate(h)).
  Corner g (the sector from g to ccw(g)) lies in the face of dart g.

Surface modes:

  planar  the sphere. Faces may be marked as punctures; when any face is
          marked, exactly one mark is the infinity face (R^2 minus points).
          With a "boundary" list the diagram is a disk tangle instead.
  disk    alias for planar-with-boundary.
  closed  a closed orientable surface; genus comes from V - E + F (and is
          checked against a declared genus). Marked faces are punctures.

Face groups (closed mode) declare that several faces of the ribbon
structure form one cell of the surface with a given genus, for diagrams
whose complementary regions are not all disks.

Regions used elsewhere are cells: a face, a face group, or (disk mode) one
of the 2l sectors the boundary circle cuts the outer face into.

JSON input:

  {"surface": {"mode": "planar"|"closed"|"disk", "genus": g?},
   "crossings": [{"id": c, "halfedges": [h1, h2, h3, h4], "under": [h1, h3]}],
   "edges": [{"id": e, "ends": [h, h'], "weight": "x5"?}],
   "components": [{"edges": [...], "oriented_from": h}],
   "marked_faces": [{"at_left_of": h, "infinity": bool}],
   "boundary": [p1, ..., p2l]?,
   "face_groups": [{"faces": [{"at_left_of": h}, ...], "genus": g}]?}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Iterable

import networkx as nx

from gf2fun import PolyGF2, parse_poly

MODES = ("planar", "closed", "disk")


class DiagramError(ValueError):
    """Structural problem with a diagram; the message names the location."""


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    id: str
    # rotated so that halfedges[0] and halfedges[2] are the under-strand
    halfedges: tuple[str, str, str, str]


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]
    weight: PolyGF2


@dataclass(frozen=True)
class Component:
    edges: tuple[str, ...]
    oriented_from: str | None = None


@dataclass(frozen=True)
class MarkedFace:
    at_left_of: str
    infinity: bool = False


@dataclass(frozen=True)
class FaceGroup:
    faces: tuple[str, ...]
    genus: int = 0


@dataclass(frozen=True)
class Face:
    id: int
    walk: tuple[int, ...]
    corners: tuple[int, ...]
    punctured: bool = False
    infinity: bool = False


@dataclass(frozen=True)
class Cell:
    """A complementary region of the diagram in the surface (before smoothing)."""
    id: int
    kind: str                 # "face", "group" or "sector"
    faces: tuple[int, ...]
    darts: tuple[int, ...]
    corners: tuple[int, ...]
    chi: int                  # punctures already removed
    punctured: bool = False
    infinity: bool = False
    puncture_index: int | None = None


@dataclass(frozen=True)
class SurfaceProfile:
    euler_char: int
    genus: int
    puncture_count: int
    colorable: bool


@dataclass(frozen=True)
class Coloring:
    colors: tuple[str, ...]            # per cell: "black" or "white"
    convention: tuple[bool, ...]       # per crossing: 1-smoothing merges black
    convention_ok: bool

    def is_black(self, cell: int) -> bool:
        return self.colors[cell] == "black"


@dataclass(frozen=True)
class SurfaceDiagram:
    mode: str
    crossings: tuple[Crossing, ...]
    edges: tuple[Edge, ...]
    components: tuple[Component, ...] = ()
    marked_faces: tuple[MarkedFace, ...] = ()
    boundary: tuple[str, ...] = ()
    face_groups: tuple[FaceGroup, ...] = ()
    declared_genus: int | None = None

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def is_disk(self) -> bool:
        return self.mode == "disk"

    @cached_property
    def map(self) -> CombinatorialMap:
        return CombinatorialMap.build(self)


# ---------------------------------------------------------------------------
# Combinatorial map
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CombinatorialMap:
    n: int
    names: list[str]
    index: dict[str, int]
    mate: list[int]
    edge_of: list[int]
    edge_sign: list[int]                  # +1 when the dart runs ends[0] -> ends[1]
    faces: list[Face] = field(default_factory=list)
    face_of: list[int] = field(default_factory=list)
    cells: list[Cell] = field(default_factory=list)
    cell_of: list[int] = field(default_factory=list)
    direction: list[int] = field(default_factory=list)   # per edge, 0 if unoriented
    component_edges: list[tuple[int, ...]] = field(default_factory=list)
    euler_char: int = 2
    genus: int = 0

    # --- rotation ---

    def is_crossing_dart(self, h: int) -> bool:
        return h < 4 * self.n

    def ccw(self, h: int) -> int:
        if h >= 4 * self.n:
            return h
        return 4 * (h // 4) + (h % 4 + 1) % 4

    def cw(self, h: int) -> int:
        if h >= 4 * self.n:
            return h
        return 4 * (h // 4) + (h % 4 + 3) % 4

    def opposite(self, h: int) -> int | None:
        if h >= 4 * self.n:
            return None
        return 4 * (h // 4) + (h % 4 + 2) % 4

    def forward(self, h: int) -> bool:
        """True when the component orientation leaves the vertex through dart h."""
        return self.direction[self.edge_of[h]] * self.edge_sign[h] > 0

    @property
    def boundary_darts(self) -> list[int]:
        return list(range(4 * self.n, len(self.names)))

    def face_vector(self, walk: Iterable[int], n_edges: int) -> list[int]:
        v = [0] * n_edges
        for h in walk:
            v[self.edge_of[h]] += self.edge_sign[h]
        return v

    # --- construction ---

    @classmethod
    def build(cls, d: SurfaceDiagram) -> CombinatorialMap:
        names: list[str] = []
        for c in d.crossings:
            names.extend(c.halfedges)
        names.extend(d.boundary)
        index: dict[str, int] = {}
        for i, name in enumerate(names):
            if name in index:
                raise DiagramError(f"half-edge {name!r} is declared twice")
            index[name] = i
        mate = [-1] * len(names)
        edge_of = [-1] * len(names)
        edge_sign = [0] * len(names)
        for k, e in enumerate(d.edges):
            if len(e.ends) != 2:
                raise DiagramError(f"edge {e.id!r} must have exactly two ends, got {len(e.ends)}")
            h0, h1 = (_lookup(index, name, f"edge {e.id!r}") for name in e.ends)
            for h, sign in ((h0, 1), (h1, -1)):
                if edge_of[h] != -1:
                    raise DiagramError(
                        f"half-edge {names[h]!r} is used by edges "
                        f"{d.edges[edge_of[h]].id!r} and {e.id!r}")
                edge_of[h] = k
                edge_sign[h] = sign
            if h0 == h1:
                raise DiagramError(f"edge {e.id!r} joins half-edge {names[h0]!r} to itself")
            mate[h0], mate[h1] = h1, h0
        for h, k in enumerate(edge_of):
            if k == -1:
                raise DiagramError(f"half-edge {names[h]!r} is not the end of any edge")

        m = cls(d.n, names, index, mate, edge_of, edge_sign)
        m._check_mode(d)
        m._trace_faces(d)
        m._build_cells(d)
        m._check_surface(d)
        m._check_connected(d)
        m._trace_components(d)
        return m

    def _trace_faces(self, d: SurfaceDiagram) -> None:
        seen = [False] * len(self.names)
        walks: list[list[int]] = []
        for start in range(len(self.names)):
            if seen[start]:
                continue
            walk = []
            h = start
            while not seen[h]:
                seen[h] = True
                walk.append(h)
                h = self.cw(self.mate[h])
            walks.append(walk)
        # ids by least dart; crossing darts sort before boundary points
        walks.sort(key=min)
        marks: dict[int, MarkedFace] = {}
        for mf in d.marked_faces:
            h = _lookup(self.index, mf.at_left_of, "marked face")
            face = next(i for i, w in enumerate(walks) if h in w)
            if face in marks:
                raise DiagramError(
                    f"marked faces at {marks[face].at_left_of!r} and {mf.at_left_of!r} "
                    "are the same face")
            marks[face] = mf
        self.face_of = [0] * len(self.names)
        for i, walk in enumerate(walks):
            start = walk.index(min(walk))
            walk = walk[start:] + walk[:start]
            for h in walk:
                self.face_of[h] = i
            corners = tuple(h for h in walk if self.is_crossing_dart(h))
            mf = marks.get(i)
            self.faces.append(Face(
                id=i, walk=tuple(walk), corners=corners,
                punctured=mf is not None, infinity=bool(mf and mf.infinity)))

    def _outer_face(self, d: SurfaceDiagram) -> int | None:
        if not d.is_disk:
            return None
        faces = {self.face_of[h] for h in self.boundary_darts}
        if len(faces) != 1:
            raise DiagramError("boundary points do not all lie on one face")
        outer = faces.pop()
        walk = self.faces[outer].walk
        walk_order = [h for h in walk if h >= 4 * self.n]
        declared = self.boundary_darts
        # walking the outer face keeps it on the left: clockwise around the disk
        if not _cyclic_equal(list(reversed(walk_order)), declared):
            raise DiagramError(
                "boundary points are not listed counterclockwise: "
                f"declared {[self.names[h] for h in declared]}, "
                f"diagram gives {[self.names[h] for h in reversed(walk_order)]}")
        return outer

    def _build_cells(self, d: SurfaceDiagram) -> None:
        outer = self._outer_face(d)
        group_of: dict[int, int] = {}
        for g, fg in enumerate(d.face_groups):
            if d.mode != "closed":
                raise DiagramError("face groups are only allowed on closed surfaces")
            if fg.genus < 0:
                raise DiagramError(f"face group {g} has negative genus")
            for name in fg.faces:
                face = self.face_of[_lookup(self.index, name, f"face group {g}")]
                if face in group_of:
                    raise DiagramError(f"face at {name!r} is listed in two face groups")
                if self.faces[face].punctured:
                    raise DiagramError(f"face at {name!r} is both marked and grouped")
                group_of[face] = g

        puncture_index: dict[int, int] = {}
        k = 0
        for mf in d.marked_faces:
            if not mf.infinity:
                k += 1
                puncture_index[self.face_of[self.index[mf.at_left_of]]] = k

        self.cell_of = [0] * len(self.names)
        placed_groups: set[int] = set()
        for face in self.faces:
            if face.id == outer:
                walk = list(face.walk)
                first = next(i for i, h in enumerate(walk) if h >= 4 * self.n)
                walk = walk[first:] + walk[:first]
                runs: list[list[int]] = []
                for h in walk:
                    if h >= 4 * self.n:
                        runs.append([])
                    runs[-1].append(h)
                runs.sort(key=lambda run: run[0])
                for run in runs:
                    self._add_cell("sector", (face.id,), run, chi=1)
                continue
            g = group_of.get(face.id)
            if g is None:
                self._add_cell(
                    "face", (face.id,), face.walk, chi=0 if face.punctured else 1,
                    punctured=face.punctured, infinity=face.infinity,
                    puncture_index=puncture_index.get(face.id))
            elif g not in placed_groups:
                placed_groups.add(g)
                members = tuple(sorted(f for f, gg in group_of.items() if gg == g))
                darts = [h for f in members for h in self.faces[f].walk]
                chi = 2 - 2 * d.face_groups[g].genus - len(members)
                self._add_cell("group", members, darts, chi=chi)

    def _add_cell(self, kind, faces, darts, *, chi, punctured=False, infinity=False,
                  puncture_index=None) -> None:
        cid = len(self.cells)
        darts = tuple(darts)
        for h in darts:
            self.cell_of[h] = cid
        self.cells.append(Cell(
            id=cid, kind=kind, faces=tuple(faces), darts=darts,
            corners=tuple(h for h in darts if self.is_crossing_dart(h)),
            chi=chi, punctured=punctured, infinity=infinity,
            puncture_index=puncture_index))

    def _check_mode(self, d: SurfaceDiagram) -> None:
        if d.mode not in MODES:
            raise DiagramError(f"unknown surface mode {d.mode!r}")
        infinities = [mf for mf in d.marked_faces if mf.infinity]
        if d.is_disk:
            if d.marked_faces:
                raise DiagramError("disk tangles cannot have marked faces")
            if not d.boundary:
                raise DiagramError("disk mode needs a boundary list")
            if len(d.boundary) % 2:
                raise DiagramError(f"disk tangles need an even number of boundary points, got {len(d.boundary)}")
        elif d.boundary:
            raise DiagramError(f"a boundary list is only allowed in disk mode, not {d.mode!r}")
        if d.mode == "planar" and d.marked_faces and len(infinities) != 1:
            raise DiagramError(
                f"planar diagrams with marked faces need exactly one infinity face, got {len(infinities)}")
        if d.mode == "closed" and infinities:
            raise DiagramError("closed surfaces have no infinity face")

    def _check_surface(self, d: SurfaceDiagram) -> None:
        vertices = d.n + len(d.boundary)
        if d.mode == "closed":
            # punctures are filled back in when recognising the surface
            chi = d.n - len(d.edges) + sum(c.chi + (1 if c.punctured else 0) for c in self.cells)
            if chi > 2 or chi % 2:
                raise DiagramError(f"V - E + F = {chi} is not the Euler characteristic of a closed orientable surface")
            genus = (2 - chi) // 2
            if d.declared_genus is not None and d.declared_genus != genus:
                raise DiagramError(f"declared genus {d.declared_genus} but the diagram has genus {genus}")
            self.euler_char, self.genus = chi, genus
        else:
            chi = vertices - len(d.edges) + len(self.faces)
            if chi != 2:
                raise DiagramError(f"V - E + F = {chi}, but {d.mode} diagrams must lie on the sphere")
            self.euler_char = 1 if d.is_disk else 2
            self.genus = 0

    def _check_connected(self, d: SurfaceDiagram) -> None:
        if not self.names:
            raise DiagramError("diagram has no crossings and no boundary points")
        g = nx.Graph()
        g.add_nodes_from(self._vertex(h) for h in range(len(self.names)))
        for h in range(len(self.names)):
            g.add_edge(self._vertex(h), self._vertex(self.mate[h]))
        for cell in self.cells:
            if cell.kind == "group":
                vs = [self._vertex(h) for h in cell.darts]
                g.add_edges_from(zip(vs, vs[1:]))
        if not nx.is_connected(g):
            raise DiagramError(
                f"diagram is not connected ({nx.number_connected_components(g)} pieces); "
                "join the pieces or declare a face group")

    def _vertex(self, h: int) -> tuple[str, int]:
        if h < 4 * self.n:
            return ("crossing", h // 4)
        return ("boundary", h)

    def _trace_components(self, d: SurfaceDiagram) -> None:
        """Follow strands straight through crossings and match declared components."""
        visited = [False] * len(self.names)
        traced: list[list[int]] = []
        starts = self.boundary_darts + list(range(4 * self.n))
        for start in starts:
            if visited[start]:
                continue
            darts = []
            h = start
            while True:
                visited[h] = True
                visited[self.mate[h]] = True
                darts.append(h)
                nxt = self.opposite(self.mate[h])
                if nxt is None or nxt == start:
                    break
                h = nxt
            traced.append(darts)
        by_edges = {frozenset(self.edge_of[h] for h in darts): darts for darts in traced}

        edge_index = {e.id: k for k, e in enumerate(d.edges)}
        self.direction = [0] * len(d.edges)
        covered: set[frozenset] = set()
        for ci, comp in enumerate(d.components):
            if not comp.edges:
                raise DiagramError(
                    f"component {ci} has no edges; crossingless closed components are not "
                    "supported, add a kink")
            ids = frozenset(_lookup(edge_index, e, f"component {ci}") for e in comp.edges)
            darts = by_edges.get(ids)
            if darts is None:
                raise DiagramError(
                    f"component {ci} edges {sorted(comp.edges)} do not form one strand of the diagram")
            covered.add(ids)
            if comp.oriented_from is None:
                continue
            h = _lookup(self.index, comp.oriented_from, f"component {ci} orientation")
            if self.edge_of[h] not in ids:
                raise DiagramError(
                    f"component {ci} is oriented from {comp.oriented_from!r}, which is not on it")
            reverse = h not in darts
            for x in darts:
                self.direction[self.edge_of[x]] = -self.edge_sign[x] if reverse else self.edge_sign[x]
        if d.components and len(covered) != len(by_edges):
            missing = [sorted(d.edges[k].id for k in ids) for ids in by_edges if ids not in covered]
            raise DiagramError(f"strands not listed as components: {missing}")
        self.component_edges = [tuple(self.edge_of[h] for h in darts) for darts in traced]


def _lookup(table: dict, name: str, where: str) -> int:
    try:
        return table[name]
    except KeyError:
        raise DiagramError(f"{where} names unknown half-edge or edge {name!r}") from None


def _cyclic_equal(a: list, b: list) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    return any(doubled[i:i + len(b)] == b for i in range(len(a)))


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

def parse_diagram(text: str) -> SurfaceDiagram:
    """Parse and validate the JSON diagram format."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagramError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise DiagramError("diagram JSON must be an object")
    return diagram_from_dict(data)


def diagram_from_dict(data: dict[str, Any]) -> SurfaceDiagram:
    surface = data.get("surface") or {}
    mode = surface.get("mode", "planar")
    boundary = tuple(data.get("boundary") or ())
    if mode == "planar" and boundary:
        mode = "disk"
    zero_ok = bool(data.get("weights_shifted", False))

    crossings = []
    for c in data.get("crossings", []):
        cid = str(c.get("id"))
        hes = list(c.get("halfedges", []))
        if len(hes) != 4:
            raise DiagramError(f"crossing {cid!r} has {len(hes)} half-edges; crossings are 4-valent")
        crossings.append(Crossing(cid, _normalize_rotation(cid, hes, list(c.get("under", [])))))

    edges = []
    for k, e in enumerate(data.get("edges", [])):
        eid = str(e.get("id", f"e{k + 1}"))
        ends = tuple(e.get("ends", []))
        if len(ends) != 2:
            raise DiagramError(f"edge {eid!r} must have exactly two ends, got {len(ends)}")
        raw = e.get("weight")
        try:
            weight = parse_poly(raw) if raw is not None else PolyGF2.var(k + 1)
        except ValueError as err:
            raise DiagramError(f"edge {eid!r}: {err}") from None
        if weight.is_zero() and not zero_ok:
            raise DiagramError(f"edge {eid!r} has weight 0; edge weights must be nonzero")
        edges.append(Edge(eid, ends, weight))

    components = tuple(
        Component(tuple(c.get("edges", [])), c.get("oriented_from"))
        for c in data.get("components", []))
    marked = tuple(
        MarkedFace(m["at_left_of"], bool(m.get("infinity", False)))
        for m in data.get("marked_faces", []))
    groups = tuple(
        FaceGroup(tuple(f["at_left_of"] for f in g.get("faces", [])), int(g.get("genus", 0)))
        for g in data.get("face_groups", []))

    d = SurfaceDiagram(
        mode=mode, crossings=tuple(crossings), edges=tuple(edges),
        components=components, marked_faces=marked, boundary=boundary,
        face_groups=groups, declared_genus=surface.get("genus"))
    return validated(d)


def validated(d: SurfaceDiagram) -> SurfaceDiagram:
    """Build (and so check) the combinatorial map; returns d for chaining."""
    _ = d.map
    return d


def _normalize_rotation(cid: str, halfedges: list[str], under: list[str]) -> tuple[str, str, str, str]:
    if len(under) != 2 or any(u not in halfedges for u in under):
        raise DiagramError(f"crossing {cid!r}: under pair {under} must name two of its half-edges")
    i, j = sorted(halfedges.index(u) for u in under)
    if j - i != 2:
        raise DiagramError(f"crossing {cid!r}: under pair {under} is not opposite in the rotation")
    return tuple(halfedges[i:] + halfedges[:i])


def diagram_to_dict(d: SurfaceDiagram) -> dict[str, Any]:
    surface: dict[str, Any] = {"mode": d.mode}
    if d.mode == "closed":
        surface["genus"] = d.map.genus
    out: dict[str, Any] = {
        "surface": surface,
        "crossings": [
            {"id": c.id, "halfedges": list(c.halfedges), "under": [c.halfedges[0], c.halfedges[2]]}
            for c in d.crossings],
        "edges": [{"id": e.id, "ends": list(e.ends), "weight": e.weight.render()} for e in d.edges],
        "components": [
            {"edges": list(c.edges), **({"oriented_from": c.oriented_from} if c.oriented_from else {})}
            for c in d.components],
    }
    if d.marked_faces:
        out["marked_faces"] = [{"at_left_of": m.at_left_of, "infinity": m.infinity} for m in d.marked_faces]
    if d.boundary:
        out["boundary"] = list(d.boundary)
    if d.face_groups:
        out["face_groups"] = [
            {"faces": [{"at_left_of": f} for f in g.faces], "genus": g.genus} for g in d.face_groups]
    if any(e.weight.is_zero() for e in d.edges):
        out["weights_shifted"] = True
    return out


def dump_diagram(d: SurfaceDiagram) -> str:
    return json.dumps(diagram_to_dict(d), indent=2)


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------

def trace_faces(d: SurfaceDiagram) -> list[Face]:
    return list(d.map.faces)


def cell_graph(d: SurfaceDiagram) -> nx.MultiGraph:
    """Cells adjacent across edges (self-loops where an edge has one cell on both sides)."""
    m = d.map
    g = nx.MultiGraph()
    g.add_nodes_from(range(len(m.cells)))
    for k in range(len(d.edges)):
        h = next(x for x in range(len(m.names)) if m.edge_of[x] == k)
        g.add_edge(m.cell_of[h], m.cell_of[m.mate[h]], edge=k)
    return g


def _odd_cycle(g: nx.MultiGraph) -> list[int] | None:
    for u, v in g.edges():
        if u == v:
            return [u]
    simple = nx.Graph(g)
    for comp in nx.connected_components(simple):
        root = min(comp)
        tree = nx.bfs_tree(simple, root)
        depth = nx.shortest_path_length(tree, root)
        for u, v in simple.subgraph(comp).edges():
            if depth[u] % 2 == depth[v] % 2:
                und = tree.to_undirected()
                return nx.shortest_path(und, u, v)
    return None


def surface_profile(d: SurfaceDiagram) -> SurfaceProfile:
    m = d.map
    return SurfaceProfile(
        euler_char=m.euler_char,
        genus=m.genus,
        puncture_count=sum(1 for c in m.cells if c.punctured),
        colorable=_odd_cycle(cell_graph(d)) is None,
    )


def checkerboard(d: SurfaceDiagram) -> Coloring:
    """The 2-coloring of cells in which 1-smoothings merge black quadrants.

    Of the two colorings of a connected diagram, the one satisfying the
    convention at more crossings is returned; for alternating diagrams it
    holds at every crossing.
    """
    g = cell_graph(d)
    cycle = _odd_cycle(g)
    if cycle is not None:
        raise DiagramError(f"diagram cannot be checkerboard colored: odd cycle of cells {cycle}")
    m = d.map
    simple = nx.Graph(g)
    side = nx.bipartite.color(simple)
    votes = 0
    for i in range(d.n):
        a, c = m.cell_of[4 * i], m.cell_of[4 * i + 2]
        votes += 1 if side[a] == 0 else -1
        votes += 1 if side[c] == 0 else -1
    black_side = 0 if votes >= 0 else 1
    colors = tuple("black" if side[c.id] == black_side else "white" for c in m.cells)
    convention = tuple(
        colors[m.cell_of[4 * i]] == "black" and colors[m.cell_of[4 * i + 2]] == "black"
        for i in range(d.n))
    return Coloring(colors, convention, all(convention))


def is_alternating(d: SurfaceDiagram) -> bool:
    """Every edge between crossings joins an over half-edge to an under half-edge."""
    m = d.map
    for h in range(4 * d.n):
        other = m.mate[h]
        if m.is_crossing_dart(other) and (h % 2) == (other % 2):
            return False
    return True


def crossing_signs(d: SurfaceDiagram) -> tuple[int, int, tuple[int, ...]]:
    """(n_plus, n_minus, per-crossing sign) by the right-hand rule.

    Positive iff the incoming over half-edge follows the outgoing under
    half-edge counterclockwise.
    """
    m = d.map
    missing = [d.edges[k].id for k, s in enumerate(m.direction) if s == 0]
    if missing:
        raise DiagramError(f"edges without an orientation (orient every component): {missing}")
    signs = []
    for i in range(d.n):
        a, b, c, dd = (4 * i + p for p in range(4))
        u_out = a if m.forward(a) else c
        o_in = dd if m.forward(b) else b
        signs.append(1 if o_in == m.ccw(u_out) else -1)
    n_plus = sum(1 for s in signs if s > 0)
    return n_plus, len(signs) - n_plus, tuple(signs)


def with_weights(d: SurfaceDiagram, weights: Iterable[PolyGF2]) -> SurfaceDiagram:
    new_edges = tuple(replace(e, weight=w) for e, w in zip(d.edges, weights))
    return replace(d, edges=new_edges)
