"""
Exact arithmetic over GF(2), its multivariate polynomials and their
fraction field, plus integer lattice reduction for curve-class keys.

Every coefficient in the skein complexes lives in Z/2(x1, ..., xn): edge
weights are polynomials, circle weights [C] are sums of edge weights, and the
collapsed differential divides by them. Three value types cover that:

  PolyGF2    - sparse polynomial, a frozenset of monomials. A monomial is a
               tuple of (variable id, exponent) pairs sorted by variable id;
               the empty tuple is the constant 1. Addition is symmetric
               difference, so duplicates cancel on construction.
  RatFn      - num/den pair. Common monomial factors are always cancelled;
               an exact GCD (sympy, GF(2) polynomial ring) is taken when both
               sides have at most GCD_TERM_BOUND terms. Above the bound the
               fraction stays unreduced and equality falls back to
               cross-multiplication, so zero and equality tests stay exact.
  IntLattice - Hermite normal form (sympy, over ZZ) of a set of generators,
               used to pick one canonical vector per homology coset.

Textual grammar shared by the CLI and golden files:
  x3            single variable
  x1+x2         sum, terms in graded-lex order, highest first
  x1^2*x2       monomial with exponent
  (x1+x2)/(x1*x2)
"""
from __future__ import annotations

import functools
import re
import sys
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import GF, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring

Monomial = tuple[tuple[int, int], ...]

DEFAULT_GCD_TERM_BOUND = 40

# Set from settings.load_settings by the CLI; tests may override.
_gcd_term_bound = DEFAULT_GCD_TERM_BOUND
_warned_unreduced = False


def set_gcd_term_bound(bound: int) -> None:
    global _gcd_term_bound
    if bound < 1:
        raise ValueError(f"GCD_TERM_BOUND must be positive, got {bound}")
    _gcd_term_bound = bound


def get_gcd_term_bound() -> int:
    return _gcd_term_bound


# --- monomials ---

def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[int, int] = dict(a)
    for var, e in b:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def _mono_key(m: Monomial) -> tuple:
    """Graded lexicographic key: total degree, then x0 > x1 > ... ."""
    return (sum(e for _, e in m), tuple((-v, e) for v, e in m))


def _mono_render(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in m)


# --- PolyGF2 ---

@dataclass(frozen=True)
class PolyGF2:
    """A polynomial over GF(2) as its set of monomials (see module docstring)."""
    terms: frozenset = frozenset()

    @classmethod
    def zero(cls) -> PolyGF2:
        return cls(frozenset())

    @classmethod
    def one(cls) -> PolyGF2:
        return cls(frozenset({()}))

    @classmethod
    def var(cls, var_id: int) -> PolyGF2:
        return cls(frozenset({((var_id, 1),)}))

    @classmethod
    def from_monomials(cls, monomials: Iterable[Monomial]) -> PolyGF2:
        acc: set = set()
        for m in monomials:
            acc ^= {m}
        return cls(frozenset(acc))

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == frozenset({()})

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: PolyGF2) -> PolyGF2:
        return PolyGF2(self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: PolyGF2) -> PolyGF2:
        if self.is_zero() or other.is_zero():
            return PolyGF2.zero()
        acc: set = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {_mono_mul(a, b)}
        return PolyGF2(frozenset(acc))

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def ordered_terms(self) -> list[Monomial]:
        return sorted(self.terms, key=_mono_key, reverse=True)

    def substitute(self, var_id: int, value: PolyGF2) -> PolyGF2:
        """Replace one variable by a polynomial (field inclusions y -> xA+xn+xB)."""
        out = PolyGF2.zero()
        for m in self.terms:
            term = PolyGF2.one()
            for v, e in m:
                factor = value if v == var_id else PolyGF2.var(v)
                for _ in range(e):
                    term = term * factor
            out = out + term
        return out

    def render(self) -> str:
        if self.is_zero():
            return "0"
        return "+".join(_mono_render(m) for m in self.ordered_terms())

    def __str__(self) -> str:
        return self.render()


def poly_op(kind: str, p: PolyGF2, q: PolyGF2) -> PolyGF2:
    """Dispatch for the two ring operations by name ("add" or "mul")."""
    if kind == "add":
        return p + q
    if kind == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation: {kind!r}")


_TERM_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_poly(text: str) -> PolyGF2:
    """Parse the textual grammar (`x1+x2*x3^2+1`) into a PolyGF2."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    if body == "0":
        return PolyGF2.zero()
    if not body:
        raise ValueError("empty polynomial")
    monomials: list[Monomial] = []
    for term in body.split("+"):
        term = term.strip()
        if term == "1":
            monomials.append(())
            continue
        exps: dict[int, int] = {}
        for factor in term.split("*"):
            m = _TERM_RE.match(factor.strip())
            if not m:
                raise ValueError(f"cannot parse polynomial term {term!r} in {text!r}")
            var = int(m.group(1))
            exps[var] = exps.get(var, 0) + int(m.group(2) or 1)
        monomials.append(tuple(sorted(exps.items())))
    return PolyGF2.from_monomials(monomials)


# --- sympy bridge for GCD ---

@functools.lru_cache(maxsize=None)
def _gf2_ring(nvars: int):
    R, *_ = ring([f"v{i}" for i in range(nvars)], GF(2), grlex)
    return R


def _to_ring(p: PolyGF2, position: Mapping[int, int], R):
    n = len(position)
    data = {}
    for m in p.terms:
        exps = [0] * n
        for v, e in m:
            exps[position[v]] = e
        data[tuple(exps)] = 1
    return R.from_dict(data)


def _from_ring(elem, variables: Sequence[int]) -> PolyGF2:
    monomials = []
    for exps, coeff in elem.items():
        if int(coeff) % 2 == 0:
            continue
        monomials.append(tuple((variables[i], e) for i, e in enumerate(exps) if e))
    return PolyGF2.from_monomials(monomials)


def _gcd_cofactors(a: PolyGF2, b: PolyGF2) -> tuple[PolyGF2, PolyGF2]:
    variables = sorted(a.variables() | b.variables())
    if not variables:
        return a, b
    position = {v: i for i, v in enumerate(variables)}
    R = _gf2_ring(len(variables))
    _, cff, cfg = _to_ring(a, position, R).cofactors(_to_ring(b, position, R))
    return _from_ring(cff, variables), _from_ring(cfg, variables)


def _strip_common_monomial(a: PolyGF2, b: PolyGF2) -> tuple[PolyGF2, PolyGF2]:
    """Divide both sides by the largest monomial dividing every term of both."""
    terms = list(a.terms) + list(b.terms)
    common: dict[int, int] | None = None
    for m in terms:
        exps = dict(m)
        if common is None:
            common = exps
        else:
            common = {v: min(e, exps[v]) for v, e in common.items() if v in exps}
        if not common:
            return a, b

    def divide(p: PolyGF2) -> PolyGF2:
        out = []
        for m in p.terms:
            exps = dict(m)
            for v, e in common.items():
                exps[v] -= e
            out.append(tuple(sorted((v, e) for v, e in exps.items() if e)))
        return PolyGF2(frozenset(out))

    return divide(a), divide(b)


# --- RatFn ---

@dataclass(frozen=True, eq=False)
class RatFn:
    """An element num/den of the fraction field; build with RatFn.make."""
    num: PolyGF2
    den: PolyGF2
    reduced: bool = True

    @classmethod
    def make(cls, num: PolyGF2, den: PolyGF2 | None = None, *, force_gcd: bool = False) -> RatFn:
        global _warned_unreduced
        if den is None:
            den = PolyGF2.one()
        if den.is_zero():
            raise ZeroDivisionError("fraction with zero denominator")
        if num.is_zero():
            return cls(PolyGF2.zero(), PolyGF2.one())
        if den.is_one():
            return cls(num, den)
        num, den = _strip_common_monomial(num, den)
        if den.is_one() or num.is_one():
            return cls(num, den)
        if force_gcd or max(len(num), len(den)) <= _gcd_term_bound:
            num, den = _gcd_cofactors(num, den)
            return cls(num, den)
        if not _warned_unreduced:
            print(f"Warning: fractions above {_gcd_term_bound} terms are left unreduced "
                  "(GCD_TERM_BOUND); equality uses cross-multiplication",
                  file=sys.stderr)
            _warned_unreduced = True
        return cls(num, den, reduced=False)

    @classmethod
    def zero(cls) -> RatFn:
        return cls(PolyGF2.zero(), PolyGF2.one())

    @classmethod
    def one(cls) -> RatFn:
        return cls(PolyGF2.one(), PolyGF2.one())

    @classmethod
    def from_poly(cls, p: PolyGF2) -> RatFn:
        return cls(p, PolyGF2.one())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def __add__(self, other: RatFn) -> RatFn:
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RatFn.make(self.num + other.num, self.den)
        return RatFn.make(self.num * other.den + other.num * self.den, self.den * other.den)

    __sub__ = __add__

    def __mul__(self, other: RatFn) -> RatFn:
        if self.is_zero() or other.is_zero():
            return RatFn.zero()
        return RatFn.make(self.num * other.num, self.den * other.den)

    def inv(self) -> RatFn:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Z/2(x)")
        return RatFn(self.den, self.num, self.reduced)

    def __truediv__(self, other: RatFn) -> RatFn:
        return self * other.inv()

    def cost(self) -> int:
        """Pivot cost: 0 for the unit, otherwise the number of terms."""
        if self.is_one():
            return 0
        return len(self.num) + len(self.den)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFn):
            return NotImplemented
        if self.reduced and other.reduced:
            return self.num == other.num and self.den == other.den
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        canon = self if self.reduced else RatFn.make(self.num, self.den, force_gcd=True)
        return hash((canon.num, canon.den))

    def render(self) -> str:
        if self.den.is_one():
            return self.num.render()
        return f"{_wrap(self.num)}/{_wrap(self.den)}"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"RatFn({self.render()})"


def _wrap(p: PolyGF2) -> str:
    text = p.render()
    if len(p) == 1 and "*" not in text:
        return text
    return f"({text})"


def parse_ratfn(text: str) -> RatFn:
    """Inverse of RatFn.render for golden files."""
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            return RatFn.make(parse_poly(text[:i]), parse_poly(text[i + 1:]))
    return RatFn.from_poly(parse_poly(text))


def frac_op(kind: str, a: RatFn, b: RatFn | None = None) -> RatFn:
    """Field operations by name: add, mul (binary) and inv (unary)."""
    if kind == "inv":
        return a.inv()
    if b is None:
        raise ValueError(f"{kind} needs two operands")
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown field operation: {kind!r}")


# --- rank ---

SparseRow = dict[int, RatFn]


def _as_sparse(m) -> list[SparseRow]:
    rows: list[SparseRow] = []
    for row in m:
        if isinstance(row, dict):
            rows.append({j: v for j, v in row.items() if not v.is_zero()})
        else:
            rows.append({j: v for j, v in enumerate(row) if not v.is_zero()})
    return rows


def rank(m) -> int:
    """Exact rank over Z/2(x) by Gaussian elimination.

    Accepts a dense list of lists of RatFn or a list of sparse rows
    ({column: RatFn}). Each step pivots on the cheapest entry available: a
    unit if there is one, else the entry with fewest terms in its sparsest
    row, so fractions grow as slowly as the matrix allows.
    """
    rows = [r for r in _as_sparse(m) if r]
    result = 0
    while rows:
        best = None
        for i, row in enumerate(rows):
            for j, v in row.items():
                key = (v.cost(), len(row), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        _, pi, pj = best
        pivot_row = rows.pop(pi)
        pivot_inv = pivot_row[pj].inv()
        remaining: list[SparseRow] = []
        for row in rows:
            if pj in row:
                factor = row[pj] * pivot_inv
                for j, v in pivot_row.items():
                    updated = row.get(j, RatFn.zero()) + factor * v
                    if updated.is_zero():
                        row.pop(j, None)
                    else:
                        row[j] = updated
                row.pop(pj, None)
            if row:
                remaining.append(row)
        rows = remaining
        result += 1
    return result


def rank_gf2(m: Sequence[Sequence[int]], ncols: int) -> int:
    """Rank of a 0/1 matrix over GF(2) (the untwisted differential)."""
    if not m or ncols == 0:
        return 0
    K = GF(2)
    dm = DomainMatrix([[K(x % 2) for x in row] for row in m], (len(m), ncols), K)
    return dm.rank()


def matmul_is_zero(a: list[SparseRow], b: list[SparseRow]) -> bool:
    """True iff the sparse product a·b vanishes (used for the ∂² checks).

    `a` maps columns of b's target to rows: a[i][k] * b[k][j].
    """
    for row in a:
        acc: dict[int, RatFn] = {}
        for k, v in row.items():
            if k >= len(b):
                continue
            for j, w in b[k].items():
                acc[j] = acc.get(j, RatFn.zero()) + v * w
        if any(not x.is_zero() for x in acc.values()):
            return False
    return True


# --- integer lattices ---

@dataclass(frozen=True)
class IntLattice:
    """Sublattice of Z^dim, kept as HNF columns with their pivot rows.

    Pivot rows decrease from right to left, and entries to the right of a
    pivot (in its row) are reduced into [0, pivot).
    """
    dim: int
    columns: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence[int]], dim: int) -> IntLattice:
        gens = [list(g) for g in generators if any(g)]
        for g in gens:
            if len(g) != dim:
                raise ValueError(f"lattice generator of length {len(g)} in dimension {dim}")
        if not gens or dim == 0:
            return cls(dim, (), ())
        cols = [[ZZ(g[i]) for g in gens] for i in range(dim)]
        W = hermite_normal_form(DomainMatrix(cols, (dim, len(gens)), ZZ)).to_Matrix()
        columns = []
        pivots = []
        for j in range(W.shape[1]):
            col = tuple(int(W[i, j]) for i in range(dim))
            if not any(col):
                continue
            columns.append(col)
            pivots.append(max(i for i, x in enumerate(col) if x))
        return cls(dim, tuple(columns), tuple(pivots))

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return self.columns

    def contains(self, v: Sequence[int]) -> bool:
        return not any(hnf_reduce(v, self))


def hnf_reduce(v: Sequence[int], lattice: IntLattice) -> tuple[int, ...]:
    """Canonical representative of v + lattice."""
    if len(v) != lattice.dim:
        raise ValueError(f"vector of length {len(v)} reduced in a lattice of dimension {lattice.dim}")
    out = list(v)
    for col, p in sorted(zip(lattice.columns, lattice.pivots), key=lambda cp: -cp[1]):
        q = out[p] // col[p]
        if q:
            out = [x - q * c for x, c in zip(out, col)]
    return tuple(out)


def sign_canonical(v: Sequence[int], lattice: IntLattice) -> tuple[int, ...]:
    """Class key up to sign: the larger of the reductions of v and -v."""
    return max(hnf_reduce(v, lattice), hnf_reduce([-x for x in v], lattice))
