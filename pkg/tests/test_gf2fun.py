"""
Unit tests for gf2fun.py: GF(2) polynomials, fractions, rank and lattices.
"""
import itertools
import random
import sys
from pathlib import Path

import pytest
from sympy import Matrix

sys.path.insert(0, str(Path(__file__).parent.parent))
import gf2fun
from gf2fun import (
    IntLattice,
    PolyGF2,
    RatFn,
    frac_op,
    hnf_reduce,
    parse_poly,
    parse_ratfn,
    poly_op,
    rank,
    rank_gf2,
    sign_canonical,
)


def P(text):
    return parse_poly(text)


def F(num, den="1"):
    return RatFn.make(P(num), P(den))


@pytest.fixture
def small_gcd_bound():
    old = gf2fun.get_gcd_term_bound()
    gf2fun.set_gcd_term_bound(1)
    yield
    gf2fun.set_gcd_term_bound(old)


def test_addition_cancels_in_characteristic_two():
    assert P("x1+x2") + P("x2") == P("x1")
    assert (P("x3") + P("x3")).is_zero()


def test_square_of_sum_is_sum_of_squares():
    assert P("x1+x2") * P("x1+x2") == P("x1^2+x2^2")


def test_render_uses_graded_lex_order():
    assert P("x2+x1^2").render() == "x1^2+x2"
    assert P("x2+x1").render() == "x1+x2"
    assert P("1+x1*x2").render() == "x1*x2+1"
    assert PolyGF2.zero().render() == "0"


def test_parse_accepts_parentheses_and_repeated_factors():
    assert P("(x1+x2)") == P("x1+x2")
    assert P("x1*x1") == P("x1^2")


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        P("y1+x2")
    with pytest.raises(ValueError):
        P("")


def test_substitute_replaces_one_variable():
    assert P("x1*x2+x3").substitute(1, P("x4+1")) == P("x4*x2+x2+x3")


def test_poly_op_dispatch():
    assert poly_op("add", P("x1"), P("x1")).is_zero()
    assert poly_op("mul", P("x1"), P("x2")) == P("x1*x2")
    with pytest.raises(ValueError):
        poly_op("sub", P("x1"), P("x2"))


def test_fraction_reduced_by_gcd():
    assert F("x1^2+x2^2", "x1+x2") == RatFn.from_poly(P("x1+x2"))
    assert F("x1*x2", "x1*x3").render() == "x2/x3"


def test_fraction_with_zero_denominator_raises():
    with pytest.raises(ZeroDivisionError):
        F("x1", "0")
    with pytest.raises(ZeroDivisionError):
        RatFn.zero().inv()


def test_fraction_field_operations():
    a = F("1", "x1")
    b = F("1", "x2")
    assert a + b == F("x1+x2", "x1*x2")
    assert a * F("x1") == RatFn.one()
    assert (a + a).is_zero()
    assert frac_op("inv", F("x1+x2")) == F("1", "x1+x2")
    assert frac_op("mul", a, b) == F("1", "x1*x2")
    with pytest.raises(ValueError):
        frac_op("add", a)


def test_render_and_parse_fraction():
    value = F("x1+x2", "x1*x2")
    assert value.render() == "(x1+x2)/(x1*x2)"
    assert parse_ratfn(value.render()) == value
    assert parse_ratfn("x3") == F("x3")


def test_unreduced_fractions_still_compare_exactly(small_gcd_bound):
    big = RatFn.make(P("x1+x2") * P("x1+x3"), P("x1+x2") * P("x2+x3"))
    assert not big.reduced
    assert big == F("x1+x3", "x2+x3")
    assert hash(big) == hash(F("x1+x3", "x2+x3"))


def test_gcd_term_bound_must_be_positive():
    with pytest.raises(ValueError):
        gf2fun.set_gcd_term_bound(0)


def test_rank_over_the_fraction_field():
    x1, x2, x3 = (RatFn.from_poly(P(f"x{i}")) for i in (1, 2, 3))
    assert rank([[x1, x2], [x1 * x3, x2 * x3]]) == 1
    assert rank([[RatFn.one(), x1], [x1, RatFn.one()]]) == 2
    assert rank([[RatFn.one(), RatFn.one()], [RatFn.one(), RatFn.one()]]) == 1
    assert rank([{0: x1}, {1: x2}, {0: x1, 1: x2}]) == 2
    assert rank([]) == 0


def test_rank_gf2():
    assert rank_gf2([[1, 1], [1, 1]], 2) == 1
    assert rank_gf2([[1, 0], [0, 1], [1, 1]], 2) == 2
    assert rank_gf2([], 3) == 0


def test_lattice_reduction_picks_one_representative_per_coset():
    lat = IntLattice.from_generators([(2, 0), (0, 3)], 2)
    assert hnf_reduce((5, 7), lat) == (1, 1)
    assert lat.contains((4, 6))
    assert not lat.contains((1, 0))


def test_sign_canonical_identifies_v_and_minus_v():
    lat = IntLattice.from_generators([(1, 1, 0)], 3)
    assert sign_canonical((0, 0, 1), lat) == sign_canonical((0, 0, -1), lat)
    assert sign_canonical((1, 0, 0), lat) == sign_canonical((0, -1, 0), lat)


def test_lattice_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        IntLattice.from_generators([(1, 2)], 3)


# ---------------------------------------------------------------------------
# Randomized checks against direct oracles
# ---------------------------------------------------------------------------

def _random_poly(rng):
    """A random polynomial in x1, x2 of degree at most 2 in each variable."""
    monomials = []
    for a, b in itertools.product(range(3), repeat=2):
        if rng.random() < 0.35:
            monomials.append(tuple((v, e) for v, e in ((1, a), (2, b)) if e))
    return PolyGF2.from_monomials(monomials)


def _random_fraction(rng, zero_ok=True):
    while True:
        num, den = _random_poly(rng), _random_poly(rng)
        if den.is_zero() or (num.is_zero() and not zero_ok):
            continue
        return RatFn.make(num, den)


@pytest.mark.parametrize("seed", range(25))
def test_fraction_field_axioms(seed):
    rng = random.Random(seed)
    a, b, c = (_random_fraction(rng) for _ in range(3))
    u = _random_fraction(rng, zero_ok=False)
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + a).is_zero()
    assert a + RatFn.zero() == a
    assert a * RatFn.one() == a
    assert (u * u.inv()).is_one()
    assert (a / u) * u == a


def _det(m):
    """Leibniz expansion; signs vanish in characteristic 2."""
    total = RatFn.zero()
    for perm in itertools.permutations(range(len(m))):
        term = RatFn.one()
        for i, j in enumerate(perm):
            term = term * m[i][j]
        total = total + term
    return total


def _rank_by_minors(m):
    nrows, ncols = len(m), len(m[0])
    for k in range(min(nrows, ncols), 0, -1):
        for rows in itertools.combinations(range(nrows), k):
            for cols in itertools.combinations(range(ncols), k):
                if not _det([[m[i][j] for j in cols] for i in rows]).is_zero():
                    return k
    return 0


def _random_matrix(rng, seed):
    nrows, ncols = 2 + seed % 3, 2 + (seed // 3) % 3
    m = [[_random_fraction(rng) if rng.random() < 0.7 else RatFn.zero() for _ in range(ncols)]
         for _ in range(nrows)]
    if seed % 2 == 0:
        # last row depends on the first two (on the first alone for two rows)
        f = _random_fraction(rng)
        base = m[1] if nrows > 2 else [RatFn.zero()] * ncols
        m[-1] = [f * x + y for x, y in zip(m[0], base)]
    return m


@pytest.mark.parametrize("seed", range(30))
def test_rank_matches_minor_expansion(seed):
    m = _random_matrix(random.Random(seed), seed)
    assert rank(m) == _rank_by_minors(m)


@pytest.mark.parametrize("seed", range(30))
def test_rank_of_transpose(seed):
    m = _random_matrix(random.Random(1000 + seed), seed)
    transposed = [list(col) for col in zip(*m)]
    assert rank(m) == rank(transposed)


def _in_lattice(generators, v):
    """Integer solvability of sum(c_i * g_i) = v for independent generators."""
    try:
        solution, _ = Matrix(generators).T.gauss_jordan_solve(Matrix(v))
    except ValueError:
        return False
    return all(x.is_integer for x in solution)


def _random_generators(rng, dim, count):
    while True:
        gens = [[rng.randint(-4, 4) for _ in range(dim)] for _ in range(count)]
        if Matrix(gens).rank() == count:
            return gens


@pytest.mark.parametrize("seed", range(30))
def test_lattice_cosets_against_integer_solve(seed):
    rng = random.Random(seed)
    dim = 3 + seed % 3
    gens = _random_generators(rng, dim, 1 + seed % dim)
    lat = IntLattice.from_generators(gens, dim)
    v = [rng.randint(-6, 6) for _ in range(dim)]
    w = list(v)
    for g in gens:
        c = rng.randint(-3, 3)
        w = [x + c * y for x, y in zip(w, g)]
    assert hnf_reduce(v, lat) == hnf_reduce(w, lat)
    assert sign_canonical(v, lat) == sign_canonical([-x for x in w], lat)
    assert _in_lattice(gens, [x - y for x, y in zip(v, hnf_reduce(v, lat))])

    u = list(w)
    u[rng.randrange(dim)] += rng.choice([-2, -1, 1, 2])
    same = _in_lattice(gens, [x - y for x, y in zip(u, v)])
    assert (hnf_reduce(u, lat) == hnf_reduce(v, lat)) == same
    assert lat.contains([x - y for x, y in zip(u, v)]) == same
