"""
Seeded random diagrams for the randomized `check` suites and the tests.

  random_closed_diagram  n crossings glued by a random perfect matching of
                         their 4n half-edges; the surface is whatever the
                         rotation system traces out (closed mode)
  random_disk_tangle     a planar disk tangle grown from a one-crossing (or
                         arc-through-circle) seed by random R1/R2 insertions
  random_move            a uniformly chosen move kind, then a uniform site

All randomness comes from the `random.Random` passed in, so a seed fixes
the output exactly.
"""
from __future__ import annotations

import random

import networkx as nx

from surface_diagram import Component, Crossing, DiagramError, SurfaceDiagram, diagram_from_dict, validated
from transforms import MoveSpec, admissible_moves, apply_reidemeister

MAX_ATTEMPTS = 200


def random_move(d: SurfaceDiagram, rng: random.Random, *, kinds: tuple[str, ...] | None = None) -> MoveSpec:
    by_kind: dict[str, list[MoveSpec]] = {}
    for move in admissible_moves(d):
        if kinds is None or move.kind in kinds:
            by_kind.setdefault(move.kind, []).append(move)
    if not by_kind:
        raise DiagramError("no admissible Reidemeister move on this diagram")
    kind = rng.choice(sorted(by_kind))
    return rng.choice(by_kind[kind])


# ---------------------------------------------------------------------------
# Over/under choices
# ---------------------------------------------------------------------------

def _alternating_shifts(n: int, pairs: list[tuple[int, int]]) -> list[int] | None:
    """Rotation offsets s_i (under pair at s_i, s_i + 2) making every edge alternate.

    An edge between positions p at crossing i and q at crossing j alternates
    iff s_i + s_j = p + q + 1 (mod 2); None when the system has no solution.
    """
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for h, k in pairs:
        if h >= 4 * n or k >= 4 * n:
            continue
        i, j, parity = h // 4, k // 4, (h + k + 1) % 2
        if i == j:
            if parity:
                return None
            continue
        if g.has_edge(i, j) and g[i][j]["parity"] != parity:
            return None
        g.add_edge(i, j, parity=parity)
    shift = [0] * n
    for root in range(n):
        seen = {root}
        for u, v in nx.bfs_edges(g, root):
            shift[v] = shift[u] ^ g[u][v]["parity"]
            seen.add(v)
        for u, v, data in g.subgraph(seen).edges(data=True):
            if shift[u] ^ shift[v] != data["parity"]:
                return None
    return shift


def make_alternating(d: SurfaceDiagram) -> SurfaceDiagram:
    """Re-choose every crossing's over strand so the diagram alternates."""
    m = d.map
    pairs = [(h, m.mate[h]) for h in range(len(m.names)) if h < m.mate[h]]
    shifts = _alternating_shifts(d.n, pairs)
    if shifts is None:
        raise DiagramError("no choice of crossings makes this projection alternating")
    crossings = tuple(
        Crossing(c.id, c.halfedges[s:] + c.halfedges[:s]) for c, s in zip(d.crossings, shifts))
    return validated(SurfaceDiagram(
        mode=d.mode, crossings=crossings, edges=d.edges, components=d.components,
        marked_faces=d.marked_faces, boundary=d.boundary, face_groups=d.face_groups,
        declared_genus=d.declared_genus))


def _orient_all(d: SurfaceDiagram) -> SurfaceDiagram:
    strands = d.map.component_edges
    components = tuple(
        Component(tuple(d.edges[k].id for k in strand), d.edges[strand[0]].ends[0])
        for strand in strands)
    return validated(SurfaceDiagram(
        mode=d.mode, crossings=d.crossings, edges=d.edges, components=components,
        boundary=d.boundary))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def random_closed_diagram(n_crossings: int, rng: random.Random, *, alternating: bool = False) -> SurfaceDiagram:
    if n_crossings < 1:
        raise ValueError("random diagrams need at least one crossing")
    last_error = None
    for _ in range(MAX_ATTEMPTS):
        darts = list(range(4 * n_crossings))
        rng.shuffle(darts)
        pairs = [(darts[2 * k], darts[2 * k + 1]) for k in range(2 * n_crossings)]
        if alternating and _alternating_shifts(n_crossings, pairs) is None:
            continue
        names = [f"c{h // 4}.{'abcd'[h % 4]}" for h in range(4 * n_crossings)]
        unders = [rng.randrange(2) for _ in range(n_crossings)]
        data = {
            "surface": {"mode": "closed"},
            "crossings": [
                {"id": f"c{i}", "halfedges": names[4 * i:4 * i + 4],
                 "under": [names[4 * i + s], names[4 * i + s + 2]]}
                for i, s in enumerate(unders)],
            "edges": [{"id": f"e{k + 1}", "ends": [names[h], names[j]]} for k, (h, j) in enumerate(pairs)],
        }
        try:
            d = _orient_all(diagram_from_dict(data))
        except DiagramError as e:
            last_error = e
            continue
        return make_alternating(d) if alternating else d
    raise DiagramError(f"no valid random diagram after {MAX_ATTEMPTS} attempts: {last_error}")


def _star_seed() -> SurfaceDiagram:
    """One crossing, four arcs to the boundary."""
    halfedges = ["x.a", "x.b", "x.c", "x.d"]
    points = ["p1", "p2", "p3", "p4"]
    return _orient_all(diagram_from_dict({
        "surface": {"mode": "disk"},
        "crossings": [{"id": "x", "halfedges": halfedges, "under": ["x.a", "x.c"]}],
        "edges": [{"id": f"t{k + 1}", "ends": [p, h]} for k, (p, h) in enumerate(zip(points, halfedges))],
        "boundary": points,
    }))


def _clasp_seed() -> SurfaceDiagram:
    """An arc passing through a closed circle: two crossings, one closed component."""
    return _orient_all(diagram_from_dict({
        "surface": {"mode": "disk"},
        "crossings": [
            {"id": "y", "halfedges": ["y.e", "y.n", "y.w", "y.s"], "under": ["y.n", "y.s"]},
            {"id": "z", "halfedges": ["z.e", "z.n", "z.w", "z.s"], "under": ["z.e", "z.w"]},
        ],
        "edges": [
            {"id": "t1", "ends": ["p1", "y.w"]},
            {"id": "t2", "ends": ["y.e", "z.w"]},
            {"id": "t3", "ends": ["z.e", "p2"]},
            {"id": "u1", "ends": ["y.n", "z.n"]},
            {"id": "u2", "ends": ["y.s", "z.s"]},
        ],
        "boundary": ["p1", "p2"],
    }))


def random_disk_tangle(n_crossings: int, rng: random.Random, *, arcs_only: bool = True,
                       alternating: bool = False) -> SurfaceDiagram:
    """Planar disk tangle with exactly n_crossings crossings, all ends on the outer face."""
    t = _star_seed() if arcs_only else _clasp_seed()
    if n_crossings < t.n:
        raise ValueError(f"a {'arc-only' if arcs_only else 'linked'} tangle needs at least {t.n} crossing(s)")
    while t.n < n_crossings:
        kinds = ("R1+", "R1-") if n_crossings - t.n == 1 else ("R1+", "R1-", "R2")
        t = apply_reidemeister(t, random_move(t, rng, kinds=kinds))
    return make_alternating(t) if alternating else t
