"""
Unit tests for transforms.py: mirror, weight shifts, Reidemeister surgery,
signatures and the alternating grading laws.
"""
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
from complexes import PreconditionError
from diagram_gen import random_closed_diagram, random_disk_tangle
from gf2fun import parse_poly
from homology import compare_reports, homology_report
from surface_diagram import crossing_signs, is_alternating, parse_diagram, dump_diagram
from transforms import (
    MoveSpec,
    admissible_moves,
    alternating_theorem_check,
    annular_alternating_check,
    apply_reidemeister,
    arc_tangle_check,
    complete_alternating_tangle,
    disk_tangle_check,
    end_labels,
    fresh_variable,
    glyph_negation_check,
    goeritz_signature,
    jaeger_invariance_check,
    jaeger_shift,
    mirror,
    mirror_duality_check,
    move_invariance_check,
    punctured_plane_check,
    push_weights_to_boundary,
    reidemeister_check,
    signature_alternating,
    track_reidemeister,
)


def _same_homology(a, b, which="CT"):
    ok, message = compare_reports(homology_report(a, which), homology_report(b, which))
    assert ok, message


# ---------------------------------------------------------------------------
# Mirror and symmetries
# ---------------------------------------------------------------------------

def test_mirror_switches_every_sign(load_fixture):
    d = load_fixture("trefoil_right")
    assert crossing_signs(mirror(d))[:2] == (0, 3)
    assert crossing_signs(mirror(mirror(d))) == crossing_signs(d)


@pytest.mark.parametrize("name", ["ex1", "ex5", "hopf", "tangle_one_crossing"])
def test_mirror_duality(load_fixture, name):
    ok, message = mirror_duality_check(load_fixture(name))
    assert ok, message


@pytest.mark.parametrize("name", ["ex1", "ex3", "ex5"])
def test_glyph_negation(load_fixture, name):
    ok, message = glyph_negation_check(homology_report(load_fixture(name), "CT"))
    assert ok, message


# ---------------------------------------------------------------------------
# Weight shifts
# ---------------------------------------------------------------------------

def test_shift_moves_weight_onto_continuing_edge(load_fixture):
    d = load_fixture("ex1")
    shifted = jaeger_shift(d, "e1", "u")
    weights = {e.id: e.weight.render() for e in shifted.edges}
    assert weights["e1"] == "0"
    assert weights["e3"] == "x1+x3"
    assert weights["e2"] == "x2"


def test_partial_shift_and_its_round_trip(load_fixture):
    d = load_fixture("ex1")
    once = jaeger_shift(d, "e1", "u", parse_poly("x7"))
    weights = {e.id: e.weight for e in once.edges}
    assert weights["e1"] == parse_poly("x1+x7")
    assert weights["e3"] == parse_poly("x3+x7")
    back = jaeger_shift(once, "e1", "u", parse_poly("x7"))
    assert [e.weight for e in back.edges] == [e.weight for e in d.edges]


def test_default_shift_does_not_undo_itself(load_fixture):
    d = load_fixture("ex1")
    once = jaeger_shift(d, "e1", "u")
    twice = jaeger_shift(once, "e1", "u")
    assert [e.weight for e in twice.edges] == [e.weight for e in once.edges]
    assert [e.weight for e in twice.edges] != [e.weight for e in d.edges]


def test_shift_errors(load_fixture):
    d = load_fixture("ex1")
    with pytest.raises(PreconditionError, match="does not end at"):
        jaeger_shift(d, "e6", "u")
    with pytest.raises(PreconditionError, match="both ends"):
        jaeger_shift(d, "e6", "s")
    with pytest.raises(PreconditionError, match="unknown edge"):
        jaeger_shift(d, "nope", "s")


def test_shifted_diagram_serializes_with_zero_weights(load_fixture):
    shifted = jaeger_shift(load_fixture("ex1"), "e1", "u")
    again = parse_diagram(dump_diagram(shifted))
    assert again.edges[0].weight.is_zero()


@pytest.mark.parametrize("name", ["ex1", "ex5", "hopf"])
def test_weight_shift_invariance(load_fixture, name):
    ok, message = jaeger_invariance_check(load_fixture(name))
    assert ok, message


def test_push_weights_to_boundary_clears_interior_edges(load_fixture):
    t = load_fixture("tangle_one_crossing")
    before = {e.id: e.weight for e in t.edges}
    after = {e.id: e.weight for e in push_weights_to_boundary(t).edges}
    assert after["ne"].is_zero() and after["nw"].is_zero()
    assert after["sw"] == before["sw"] + before["ne"]
    assert after["se"] == before["se"] + before["nw"]


@pytest.mark.parametrize("name", ["tangle_one_crossing", "arc"])
def test_arc_tangles_match_untwisted_homology(load_fixture, name):
    ok, message = arc_tangle_check(load_fixture(name))
    assert ok, message


@pytest.mark.parametrize("seed", range(20))
def test_random_arc_tangles_match_untwisted_homology(seed):
    t = random_disk_tangle(1 + seed % 4, random.Random(seed))
    ok, message = arc_tangle_check(t)
    assert ok, message


def test_push_needs_arc_only_tangle(load_fixture):
    with pytest.raises(PreconditionError):
        push_weights_to_boundary(load_fixture("ex1"))


# ---------------------------------------------------------------------------
# Reidemeister moves
# ---------------------------------------------------------------------------

def test_fresh_variable(load_fixture):
    assert fresh_variable(load_fixture("ex1")) == 7


def test_r1_adds_a_crossing_with_fresh_weights(load_fixture):
    d = load_fixture("ex5")
    moved = apply_reidemeister(d, MoveSpec("R1+", ("A1", "left")))
    assert moved.n == 3
    assert len(moved.edges) == 6
    assert {e.weight.render() for e in moved.edges} >= {"x5", "x6"}
    ok, message = move_invariance_check(d, MoveSpec("R1+", ("A1", "left")))
    assert ok, message


def test_torus_class_keys_follow_the_move(load_fixture):
    d = load_fixture("ex5")
    moved, transport = track_reidemeister(d, MoveSpec("R1+", ("A1", "left")))
    before, after = homology_report(d), homology_report(moved)
    key = next(key for s in before.nonzero() for key, _ in s.glyph.entries)
    assert len(key) == 4
    assert len(transport.key(key)) == 6
    assert not compare_reports(before, after)[0]
    ok, message = compare_reports(*transport.align(before, after))
    assert ok, message


def test_r2_and_its_inverse_on_the_torus(load_fixture):
    d = load_fixture("ex5")
    r2 = next(m for m in admissible_moves(d) if m.kind == "R2")
    ok, message = move_invariance_check(d, r2)
    assert ok, message
    moved = apply_reidemeister(d, r2)
    inverse = next(m for m in admissible_moves(moved) if m.kind == "R2-inverse")
    _, transport = track_reidemeister(moved, inverse)
    assert transport.backward
    ok, message = move_invariance_check(moved, inverse)
    assert ok, message


def test_moves_on_a_random_torus_diagram_keep_glyphs():
    d = random_closed_diagram(4, random.Random(0))
    ok, message = move_invariance_check(d, MoveSpec("R1+", ("e2", "left")), which="both")
    assert ok, message


@pytest.mark.parametrize("kind", ["R1+", "R1-"])
@pytest.mark.parametrize("side", ["left", "right"])
def test_r1_then_inverse_restores_the_crossing_count(load_fixture, kind, side):
    d = load_fixture("hopf")
    moved = apply_reidemeister(d, MoveSpec(kind, ("a1", side)))
    kink = moved.crossings[-1].id
    back = apply_reidemeister(moved, MoveSpec("R1-inverse", (kink,)))
    assert back.n == d.n
    _same_homology(d, back)


def test_r1_sign(load_fixture):
    d = load_fixture("hopf")
    plus = apply_reidemeister(d, MoveSpec("R1+", ("a1", "left")))
    minus = apply_reidemeister(d, MoveSpec("R1-", ("a1", "left")))
    assert crossing_signs(plus)[0] == crossing_signs(d)[0] + 1
    assert crossing_signs(minus)[0] == crossing_signs(d)[0]


def test_every_admissible_move_on_example_five_preserves_homology(load_fixture):
    d = load_fixture("ex5")
    kinds = set()
    for move in admissible_moves(d):
        if move.kind in kinds:
            continue
        kinds.add(move.kind)
        ok, message = move_invariance_check(d, move)
        assert ok, message
    assert {"R1+", "R1-", "R2"} <= kinds


def test_r2_then_inverse(load_fixture):
    d = load_fixture("trefoil_right")
    r2 = next(m for m in admissible_moves(d) if m.kind == "R2")
    moved = apply_reidemeister(d, r2)
    assert moved.n == d.n + 2
    assert any(m.kind == "R2-inverse" for m in admissible_moves(moved))
    inverse = next(m for m in admissible_moves(moved) if m.kind == "R2-inverse")
    assert apply_reidemeister(moved, inverse).n == d.n


def test_r3_keeps_crossing_count(load_fixture):
    d = load_fixture("trefoil_right")
    moved = d
    rng = random.Random(5)
    for _ in range(6):
        r3 = [m for m in admissible_moves(moved) if m.kind == "R3"]
        if r3:
            break
        r2 = [m for m in admissible_moves(moved) if m.kind == "R2"]
        moved = apply_reidemeister(moved, rng.choice(r2))
    if not r3:
        pytest.skip("no R3 site reached from the trefoil in six R2 moves")
    after = apply_reidemeister(moved, r3[0])
    assert after.n == moved.n
    _same_homology(moved, after)


def test_bad_moves(load_fixture):
    d = load_fixture("ex5")
    with pytest.raises(PreconditionError, match="unknown move"):
        apply_reidemeister(d, MoveSpec("R4", ("A1",)))
    with pytest.raises(PreconditionError):
        apply_reidemeister(d, MoveSpec("R1+", ("A1", "up")))
    with pytest.raises(PreconditionError):
        apply_reidemeister(d, MoveSpec("R1-inverse", ("P1",)))
    with pytest.raises(PreconditionError):
        apply_reidemeister(d, MoveSpec("R2-inverse", ("nope",)))


def test_move_render():
    assert MoveSpec("R2", ("a", "b", "over")).render() == "R2@a,b,over"


def test_random_moves_count_only_the_moves_that_ran(load_fixture):
    ok, message = reidemeister_check(load_fixture("hopf"), random.Random(3), 3, max_crossings=4)
    assert ok, message
    assert message.startswith("3 random moves")
    assert "skipped" not in message


def test_random_moves_past_the_crossing_limit_are_not_passes(load_fixture):
    # every admissible move on the Hopf diagram adds crossings
    with pytest.raises(PreconditionError, match="went past"):
        reidemeister_check(load_fixture("hopf"), random.Random(3), 3, max_crossings=2)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["ex1", "ex2", "ex5", "hopf", "trefoil_right", "trefoil_annular",
                                  "tangle_one_crossing"])
def test_random_moves_preserve_homology(load_fixture, name):
    ok, message = reidemeister_check(load_fixture(name), random.Random(17), 25, which="both")
    assert ok, message


def _random_torus(index):
    """The index-th torus diagram among seeded 3-crossing random closed diagrams."""
    found = 0
    for seed in range(500):
        d = random_closed_diagram(3, random.Random(seed))
        if d.map.genus != 1:
            continue
        if found == index:
            return seed, d
        found += 1
    pytest.fail(f"fewer than {index + 1} torus diagrams among 500 seeds")


@pytest.mark.slow
@pytest.mark.parametrize("index", range(5))
def test_random_moves_on_random_torus_diagrams(index):
    seed, d = _random_torus(index)
    ok, message = reidemeister_check(d, random.Random(seed), 15, which="both")
    assert ok, message
    assert message.startswith("15 random moves")


# ---------------------------------------------------------------------------
# Signatures and alternating laws
# ---------------------------------------------------------------------------

def test_trefoil_signature(load_fixture):
    d = load_fixture("trefoil_right")
    assert signature_alternating(d) == -2
    assert goeritz_signature(d) == -2
    assert goeritz_signature(mirror(d)) == 2


@pytest.mark.parametrize("name", ["hopf", "kink_positive", "kink_negative"])
def test_goeritz_agrees_with_alternating_formula(load_fixture, name):
    d = load_fixture(name)
    assert goeritz_signature(d) == signature_alternating(d)


def test_unknot_signature_is_zero(load_fixture):
    assert goeritz_signature(load_fixture("kink_positive")) == 0
    assert goeritz_signature(load_fixture("kink_negative")) == 0


def test_signature_needs_planar_diagram(load_fixture):
    with pytest.raises(PreconditionError):
        goeritz_signature(load_fixture("ex5"))


def test_annular_trefoil_law(load_fixture):
    ok, message = annular_alternating_check(load_fixture("trefoil_annular"))
    assert ok, message


def test_punctured_plane_law(load_fixture):
    ok, message = punctured_plane_check(load_fixture("trefoil_annular"))
    assert ok, message


def test_annular_law_needs_a_puncture(load_fixture):
    with pytest.raises(PreconditionError):
        annular_alternating_check(load_fixture("trefoil_right"))


@pytest.mark.parametrize("name", ["trefoil_annular", "ex3"])
def test_alternating_theorem(load_fixture, name):
    d = load_fixture(name)
    assert is_alternating(d)
    ok, message = alternating_theorem_check(d)
    assert ok, message


@pytest.mark.slow
def test_alternating_theorem_genus_two(load_fixture):
    ok, message = alternating_theorem_check(load_fixture("ex4"))
    assert ok, message


def test_alternating_theorem_needs_alternating_input(load_fixture):
    with pytest.raises(PreconditionError):
        alternating_theorem_check(load_fixture("ex1"))


def test_completion_of_one_crossing_tangle(load_fixture):
    t = load_fixture("tangle_one_crossing")
    labels = end_labels(t)
    assert [lab.strand for lab in labels] == ["o", "u", "o", "u"]
    assert [lab.flow for lab in labels] == ["+", "+", "-", "-"]
    link = complete_alternating_tangle(t)
    assert link.mode == "planar" and link.n == 1
    assert is_alternating(link)
    assert len(link.edges) == 2


def test_disk_tangle_law(load_fixture):
    ok, message = disk_tangle_check(load_fixture("tangle_one_crossing"))
    assert ok, message


def test_completion_needs_crossings_at_the_boundary(load_fixture):
    with pytest.raises(PreconditionError):
        complete_alternating_tangle(load_fixture("arc"))
