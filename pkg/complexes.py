"""
The twisted skein bicomplex SK and its collapse CT, split by glyph.

Generators are decorated resolutions (States): each circle of a resolution
carries +1 or -1, arcs carry the fixed decoration v0. Gradings:

  h = |r|,  q = |r| + #(+) - #(-),  k = sum of labels on noncontractible circles
  delta = 2h - q - n_plus

Both differentials raise delta by 2:

  d_Sigma  one 0 -> 1 change at a time, by the local rule table in aps_delta
  d_V      Koszul: a + contractible circle C becomes - with coefficient [C]

CT keeps only resolutions with no contractible circles. Its differential is
the composite "d_Sigma, invert the single contractible circle's weight,
d_Sigma" summed over both orders of every pair of 0-crossings; the middle
state has exactly one contractible circle (decorated -, replaced by +). This
is the pairing <r, r'> with decoration transport built in.

Sectors (GlyphKey) never interact: every entry of either differential joins
generators with the same glyph, and a ChainError is raised if one does not.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from gf2fun import RatFn, SparseRow, matmul_is_zero, rank
from resolution import (
    Code,
    GlyphKey,
    ResolutionData,
    all_codes,
    glyph_of,
    normalize_code,
    resolution_data,
    state_color_chi,
)
from surface_diagram import SurfaceDiagram, checkerboard, crossing_signs

DEFAULT_MAX_CROSSINGS = 12

Combination = dict  # State -> RatFn


class PreconditionError(ValueError):
    """Input outside what an operation accepts (crossing guard, non-alternating input, ...)."""


class ChainError(ValueError):
    """Internal consistency failure: d^2 != 0 or a differential leaving its sector."""


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class State:
    code: Code
    decor: tuple[int, ...]           # +1 / -1 per circle of the resolution
    h: int = field(compare=False)
    q: int = field(compare=False)
    k: int = field(compare=False)

    def label(self) -> str:
        bits = "".join(str(b) for b in self.code)
        signs = "".join("+" if s > 0 else "-" for s in self.decor)
        return f"{bits}:{signs}" if signs else bits


def make_state(d: SurfaceDiagram, code, decor: Iterable[int]) -> State:
    code = normalize_code(d, code)
    decor = tuple(decor)
    data = resolution_data(d, code)
    if len(decor) != len(data.resolution.circles):
        raise ValueError(
            f"state {code} has {len(data.resolution.circles)} circles, got {len(decor)} decorations")
    h = sum(code)
    k = sum(decor[i] for i in data.noncontractible)
    return State(code, decor, h, h + sum(decor), k)


def generator_key(s: State) -> tuple:
    """Code bits first, then decorations with + before -."""
    return s.code, tuple(-x for x in s.decor)


def delta_grading(state: State, n_plus: int) -> int:
    return 2 * state.h - state.q - n_plus


def _add(acc: Combination, s: State, coeff: RatFn) -> None:
    total = acc.get(s, RatFn.zero()) + coeff
    if total.is_zero():
        acc.pop(s, None)
    else:
        acc[s] = total


# ---------------------------------------------------------------------------
# Local differentials
# ---------------------------------------------------------------------------

def _kind(data: ResolutionData, i: int) -> str:
    if i >= len(data.resolution.circles):
        return "arc"
    return "v" if data.infos[i].contractible else "w"


def aps_delta(d: SurfaceDiagram, state: State, c: int) -> Combination:
    """d_Sigma at one crossing with code 0 (characteristic 2, unit coefficients)."""
    if state.code[c] != 0:
        raise ValueError(f"crossing {d.crossings[c].id!r} is already 1-smoothed in {state.label()}")
    m = d.map
    src = resolution_data(d, state.code)
    code1 = state.code[:c] + (1,) + state.code[c + 1:]
    dst = resolution_data(d, code1)
    touched = {m.edge_of[4 * c + p] for p in range(4)}
    old = sorted({src.curve_of_edge[k] for k in touched})
    new = sorted({dst.curve_of_edge[k] for k in touched})

    position = {curve.edges: i for i, curve in enumerate(dst.resolution.circles)}
    base = [0] * len(dst.resolution.circles)
    for i, circle in enumerate(src.resolution.circles):
        if i not in old:
            base[position[circle.edges]] = state.decor[i]

    def sign(i: int) -> int:
        return state.decor[i]

    outputs: list[dict[int, int]] = []
    if len(old) == 2 and len(new) == 1:
        (x, y), (z,) = old, new
        kinds = (_kind(src, x), _kind(src, y))
        target = _kind(dst, z)
        if kinds == ("v", "v") and target == "v":
            # I
            if sign(x) > 0 or sign(y) > 0:
                outputs.append({z: 1 if sign(x) > 0 and sign(y) > 0 else -1})
        elif kinds == ("w", "w") and target == "v":
            # III
            if sign(x) != sign(y):
                outputs.append({z: -1})
        elif sorted(kinds) == ["v", "w"] and target == "w":
            # V
            v, w = (x, y) if kinds[0] == "v" else (y, x)
            if sign(v) > 0:
                outputs.append({z: sign(w)})
        elif sorted(kinds) == ["arc", "v"] and target == "arc":
            # VII
            v = x if kinds[0] == "v" else y
            if sign(v) > 0:
                outputs.append({})
    elif len(old) == 1 and len(new) == 2:
        (s,), (x, y) = old, new
        source = _kind(src, s)
        kinds = (_kind(dst, x), _kind(dst, y))
        if source == "v" and kinds == ("v", "v"):
            # II
            if sign(s) > 0:
                outputs += [{x: 1, y: -1}, {x: -1, y: 1}]
            else:
                outputs.append({x: -1, y: -1})
        elif source == "v" and kinds == ("w", "w"):
            # IV
            if sign(s) > 0:
                outputs += [{x: 1, y: -1}, {x: -1, y: 1}]
        elif source == "w" and sorted(kinds) == ["v", "w"]:
            # VI
            v, w = (x, y) if kinds[0] == "v" else (y, x)
            outputs.append({w: sign(s), v: -1})
        elif source == "arc" and sorted(kinds) == ["arc", "v"]:
            # VIII
            v = x if kinds[0] == "v" else y
            outputs.append({v: -1})

    result: Combination = {}
    for assignment in outputs:
        decor = list(base)
        for i, s in assignment.items():
            decor[i] = s
        _add(result, make_state(d, code1, decor), RatFn.one())
    return result


def koszul_delta(d: SurfaceDiagram, state: State) -> Combination:
    data = resolution_data(d, state.code)
    result: Combination = {}
    for i in data.contractible:
        if state.decor[i] > 0:
            decor = list(state.decor)
            decor[i] = -1
            _add(result, make_state(d, state.code, decor), RatFn.from_poly(data.infos[i].weight))
    return result


def sigma_delta(d: SurfaceDiagram, state: State) -> Combination:
    result: Combination = {}
    for c, bit in enumerate(state.code):
        if bit == 0:
            for t, coeff in aps_delta(d, state, c).items():
                _add(result, t, coeff)
    return result


def total_delta(d: SurfaceDiagram, state: State) -> Combination:
    result = sigma_delta(d, state)
    for t, coeff in koszul_delta(d, state).items():
        _add(result, t, coeff)
    return result


def apply(fn: Callable[[SurfaceDiagram, State], Combination], d: SurfaceDiagram,
          combo: Combination) -> Combination:
    """Extend a state map linearly to a combination."""
    result: Combination = {}
    for s, coeff in combo.items():
        for t, c in fn(d, s).items():
            _add(result, t, coeff * c)
    return result


def anticommutes(d: SurfaceDiagram, state: State) -> bool:
    """d_Sigma d_V + d_V d_Sigma vanishes on this state."""
    one = {state: RatFn.one()}
    left = apply(sigma_delta, d, apply(koszul_delta, d, one))
    right = apply(koszul_delta, d, apply(sigma_delta, d, one))
    for t, coeff in right.items():
        _add(left, t, coeff)
    return not left


# ---------------------------------------------------------------------------
# Collapsed differential
# ---------------------------------------------------------------------------

def pairing(d: SurfaceDiagram, r, c1: int, c2: int) -> RatFn:
    """<r, r11> for a contractible-free resolution r and two of its 0-crossings.

    Sum over the order of the two changes of 1/[C], where C is the single
    contractible circle of the intermediate resolution (orders whose
    intermediate does not have exactly one contractible circle contribute
    nothing); zero when r11 itself has contractible circles.
    """
    code = normalize_code(d, r)
    if code[c1] or code[c2] or c1 == c2:
        return RatFn.zero()
    if resolution_data(d, code).contractible:
        raise ValueError(f"pairing needs a resolution without contractible circles, got {code}")
    code11 = _flip(_flip(code, c1), c2)
    if resolution_data(d, code11).contractible:
        return RatFn.zero()
    total = RatFn.zero()
    for first in (c1, c2):
        mid = resolution_data(d, _flip(code, first))
        if len(mid.contractible) == 1:
            total = total + RatFn.from_poly(mid.infos[mid.contractible[0]].weight).inv()
    return total


def _flip(code: Code, c: int) -> Code:
    return code[:c] + (1 - code[c],) + code[c + 1:]


def collapsed_delta(d: SurfaceDiagram, state: State) -> Combination:
    result: Combination = {}
    zeros = [c for c, bit in enumerate(state.code) if bit == 0]
    for c1, c2 in itertools.permutations(zeros, 2):
        for mid, coeff in aps_delta(d, state, c1).items():
            data = resolution_data(d, mid.code)
            if len(data.contractible) != 1:
                continue
            i = data.contractible[0]
            if mid.decor[i] > 0:
                continue
            weight = RatFn.from_poly(data.infos[i].weight)
            if weight.is_zero():
                raise ChainError(f"contractible circle with zero weight in resolution {mid.label()}")
            decor = list(mid.decor)
            decor[i] = 1
            lifted = make_state(d, mid.code, decor)
            for t, c in aps_delta(d, lifted, c2).items():
                if resolution_data(d, t.code).contractible:
                    continue
                _add(result, t, coeff * weight.inv() * c)
    return result


# ---------------------------------------------------------------------------
# Graded complexes
# ---------------------------------------------------------------------------

@dataclass
class GradedComplex:
    """One sector: generators per delta and the delta -> delta+2 matrices.

    differential[delta][i] is a sparse row {j: coefficient} from generator i
    at delta to generator j at delta + 2.
    """
    sector: GlyphKey
    kind: str
    n_plus: int
    generators: dict[int, list[State]] = field(default_factory=dict)
    differential: dict[int, list[SparseRow]] = field(default_factory=dict)

    @property
    def shift(self) -> int:
        return -self.n_plus

    @property
    def deltas(self) -> list[int]:
        return sorted(self.generators)

    def chain_dims(self) -> dict[int, int]:
        return {delta: len(gens) for delta, gens in sorted(self.generators.items())}

    def rank_at(self, delta: int) -> int:
        return rank([dict(row) for row in self.differential.get(delta, [])])

    def is_zero(self) -> bool:
        return not any(row for rows in self.differential.values() for row in rows)

    def check_square_zero(self) -> None:
        for delta in self.deltas:
            a = self.differential.get(delta, [])
            b = self.differential.get(delta + 2, [])
            if a and b and not matmul_is_zero(a, b):
                raise ChainError(
                    f"{self.kind} differential squares to a nonzero map at delta={delta} "
                    f"in sector {self.sector.render()}")

    def entries(self) -> Iterator[tuple[State, State, RatFn]]:
        for delta in self.deltas:
            targets = self.generators.get(delta + 2, [])
            for i, row in enumerate(self.differential.get(delta, [])):
                for j, coeff in sorted(row.items()):
                    yield self.generators[delta][i], targets[j], coeff

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "glyph": self.sector.to_json(),
            **({"matching": [list(p) for p in self.sector.matching]} if self.sector.matching else {}),
            **({"colored_chi": self.sector.colored_chi} if self.sector.colored_chi is not None else {}),
            "n_plus": self.n_plus,
            "generators": {
                str(delta): [s.label() for s in gens] for delta, gens in sorted(self.generators.items())},
            "differential": [
                {"from": s.label(), "to": t.label(), "coeff": coeff.render()}
                for s, t, coeff in self.entries()],
        }


def assemble(kind: str, sector: GlyphKey, states: Iterable[State], n_plus: int,
             image: Callable[[State], Combination]) -> GradedComplex:
    gens: dict[int, list[State]] = {}
    for s in sorted(states, key=generator_key):
        gens.setdefault(delta_grading(s, n_plus), []).append(s)
    where = {s: (delta, i) for delta, lst in gens.items() for i, s in enumerate(lst)}
    diff: dict[int, list[SparseRow]] = {delta: [{} for _ in lst] for delta, lst in gens.items()}
    for delta, lst in gens.items():
        for i, s in enumerate(lst):
            for t, coeff in image(s).items():
                loc = where.get(t)
                if loc is None:
                    raise ChainError(
                        f"{kind} differential maps {s.label()} out of sector {sector.render()} "
                        f"(to {t.label()})")
                if loc[0] != delta + 2:
                    raise ChainError(
                        f"{kind} differential maps {s.label()} from delta={delta} to delta={loc[0]}")
                diff[delta][i][loc[1]] = coeff
    return GradedComplex(sector, kind, n_plus, gens, diff)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def guard_crossings(d: SurfaceDiagram, max_crossings: int) -> None:
    if d.n > max_crossings:
        raise PreconditionError(
            f"diagram has {d.n} crossings, above MAX_CROSSINGS={max_crossings} "
            "(raise it with --max-crossings)")


def n_plus_of(d: SurfaceDiagram) -> int:
    return crossing_signs(d)[0] if d.n else 0


def _decorations(n: int) -> Iterator[tuple[int, ...]]:
    return itertools.product((1, -1), repeat=n)


def sk_states(d: SurfaceDiagram) -> Iterator[State]:
    for code in all_codes(d.n):
        data = resolution_data(d, code)
        for decor in _decorations(len(data.resolution.circles)):
            yield make_state(d, code, decor)


def ct_states(d: SurfaceDiagram) -> Iterator[State]:
    for code in all_codes(d.n):
        data = resolution_data(d, code)
        if data.contractible:
            continue
        for decor in _decorations(len(data.resolution.circles)):
            yield make_state(d, code, decor)


class SectorIndex:
    """Glyph (optionally colored) of each state, cached per resolution."""

    def __init__(self, d: SurfaceDiagram, colored: bool = False):
        self.d = d
        self.colored = colored
        self.coloring = checkerboard(d) if colored else None
        self._chi: dict[Code, int] = {}

    def glyph(self, s: State) -> GlyphKey:
        data = resolution_data(self.d, s.code)
        key = glyph_of(self.d, data.resolution, s.decor, data)
        if not self.colored:
            return key
        chi = self._chi.get(s.code)
        if chi is None:
            chi = state_color_chi(self.d, self.coloring, data.resolution)[0]
            self._chi[s.code] = chi
        return GlyphKey(key.entries, key.matching, chi)

    def split(self, states: Iterable[State]) -> dict[GlyphKey, list[State]]:
        out: dict[GlyphKey, list[State]] = {}
        for s in states:
            out.setdefault(self.glyph(s), []).append(s)
        return out


def _ordered(sectors: dict[GlyphKey, list[State]]) -> list[GlyphKey]:
    return sorted(sectors, key=lambda g: (g.matching, g.entries, g.colored_chi if g.colored_chi is not None else 0))


def build_sk(d: SurfaceDiagram, *, sectors: Iterable[GlyphKey] | None = None,
             max_crossings: int = DEFAULT_MAX_CROSSINGS) -> dict[GlyphKey, GradedComplex]:
    """SK(T) split by glyph, with differential d_Sigma + d_V."""
    guard_crossings(d, max_crossings)
    n_plus = n_plus_of(d)
    split = SectorIndex(d).split(sk_states(d))
    wanted = set(sectors) if sectors is not None else None
    out = {}
    for key in _ordered(split):
        if wanted is not None and key not in wanted:
            continue
        out[key] = assemble("SK", key, split[key], n_plus, lambda s: total_delta(d, s))
    return out


def ct_sectors(d: SurfaceDiagram, *, colored: bool = False,
               max_crossings: int = DEFAULT_MAX_CROSSINGS) -> dict[GlyphKey, list[State]]:
    guard_crossings(d, max_crossings)
    return SectorIndex(d, colored).split(ct_states(d))


def build_ct(d: SurfaceDiagram, b: GlyphKey, *, colored: bool | None = None,
             max_crossings: int = DEFAULT_MAX_CROSSINGS) -> GradedComplex:
    """CT(T, b); an empty complex when no contractible-free state has glyph b."""
    colored = b.colored_chi is not None if colored is None else colored
    states = ct_sectors(d, colored=colored, max_crossings=max_crossings).get(b, [])
    return assemble("CT", b, states, n_plus_of(d), lambda s: collapsed_delta(d, s))


def build_all_ct(d: SurfaceDiagram, *, colored: bool = False,
                 max_crossings: int = DEFAULT_MAX_CROSSINGS) -> dict[GlyphKey, GradedComplex]:
    split = ct_sectors(d, colored=colored, max_crossings=max_crossings)
    n_plus = n_plus_of(d)
    return {
        key: assemble("CT", key, split[key], n_plus, lambda s: collapsed_delta(d, s))
        for key in _ordered(split)}
