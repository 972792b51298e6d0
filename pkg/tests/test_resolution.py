"""
Unit tests for resolution.py: smoothing, circle classification, glyphs.
"""
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
from resolution import (
    all_codes,
    band_corners,
    glyph_of,
    isotopy_classes,
    normalize_code,
    partner,
    regions,
    resolution_data,
    resolve,
    smoothing_arcs,
    state_color_chi,
)
from surface_diagram import checkerboard, trace_faces


def test_smoothing_tables():
    assert [partner(h, 0) for h in range(4)] == [1, 0, 3, 2]
    assert [partner(h, 1) for h in range(4)] == [3, 2, 1, 0]
    assert smoothing_arcs(1, 0) == ((4, 5, 4), (6, 7, 6))
    assert band_corners(0, 0) == (1, 3)
    assert band_corners(0, 1) == (0, 2)


def test_normalize_code_accepts_strings_and_maps(load_fixture):
    d = load_fixture("ex1")
    assert normalize_code(d, "011") == (0, 1, 1)
    assert normalize_code(d, {"s": 1, "u": 0, "w": 1}) == (1, 0, 1)
    with pytest.raises(ValueError):
        normalize_code(d, "01")
    with pytest.raises(ValueError):
        normalize_code(d, (0, 2, 1))


def test_kink_resolutions(load_fixture):
    d = load_fixture("kink_positive")
    assert len(resolve(d, "0").circles) == 2
    one = resolution_data(d, "1")
    assert len(one.resolution.circles) == 1
    assert one.infos[0].contractible
    assert one.infos[0].weight.render() == "x1+x2"


def test_negative_kink_splits_on_the_other_smoothing(load_fixture):
    d = load_fixture("kink_negative")
    assert len(resolve(d, "0").circles) == 1
    assert len(resolve(d, "1").circles) == 2


def test_sphere_circles_are_all_contractible(load_fixture):
    d = load_fixture("trefoil_right")
    for code in all_codes(d.n):
        assert all(info.contractible for info in resolution_data(d, code).infos)


def test_arc_matching_of_one_crossing_tangle(load_fixture):
    d = load_fixture("tangle_one_crossing")
    zero, one = resolve(d, "0"), resolve(d, "1")
    assert not zero.circles and not one.circles
    assert glyph_of(d, zero, ()).render() == "trivial | 0-1 2-3"
    assert glyph_of(d, one, ()).render() == "trivial | 0-3 1-2"


def test_crossingless_arc(load_fixture):
    d = load_fixture("arc")
    r = resolve(d, ())
    assert len(r.arcs) == 1 and r.arcs[0].ends == (0, 1)


def test_example_one_class_keys_are_enclosed_punctures(load_fixture):
    d = load_fixture("ex1")
    keys = set()
    for code in all_codes(d.n):
        data = resolution_data(d, code)
        keys |= {info.class_key for info in data.infos if not info.contractible}
    assert keys == {(1,), (2,), (1, 2)}


def test_contractible_circle_weight_is_sum_of_its_edges(load_fixture):
    d = load_fixture("ex1")
    weights = {
        info.weight.render()
        for code in all_codes(d.n)
        for info in resolution_data(d, code).infos if info.contractible}
    assert "x1+x2" in weights


def test_torus_grid_has_six_essential_resolutions(load_fixture):
    d = load_fixture("ex3")
    essential = [code for code in all_codes(d.n) if not resolution_data(d, code).contractible]
    assert len(essential) == 6
    for code in essential:
        data = resolution_data(d, code)
        assert len(data.resolution.circles) == 2
        assert data.classes == [[0, 1]]


def test_parallel_circles_share_a_glyph_entry(load_fixture):
    d = load_fixture("ex5")
    data = resolution_data(d, "00")
    assert data.classes == [[0, 1]]
    assert glyph_of(d, data.resolution, (1, -1)).render() == "trivial"
    plus = glyph_of(d, data.resolution, (1, 1))
    assert plus.k == 2 and plus.negated() == glyph_of(d, data.resolution, (-1, -1))


def test_mixed_resolutions_of_example_five_have_a_contractible_circle(load_fixture):
    d = load_fixture("ex5")
    assert resolution_data(d, "01").contractible
    assert resolution_data(d, "10").contractible


def test_black_euler_characteristic_drops_by_one_per_one_smoothing(load_fixture):
    d = load_fixture("trefoil_right")
    coloring = checkerboard(d)
    for code in all_codes(d.n):
        black, white = state_color_chi(d, coloring, resolve(d, code))
        assert black == 2 - sum(code)
        assert white == sum(code)


def test_state_color_chi_needs_a_coloring(load_fixture):
    d = load_fixture("trefoil_right")
    with pytest.raises(ValueError):
        state_color_chi(d, None, resolve(d, "000"))


def test_every_dart_lies_on_one_face(load_fixture):
    d = load_fixture("trefoil_right")
    walks = [h for face in trace_faces(d) for h in face.walk]
    assert sorted(walks) == list(range(4 * d.n))


def test_regions_of_a_contractible_circle_are_two_disks(load_fixture):
    d = load_fixture("kink_positive")
    profiles = regions(d, "1", {0})
    assert sorted(p.euler_char for p in profiles) == [1, 1]


def test_cutting_the_torus_along_parallel_circles(load_fixture):
    d = load_fixture("ex5")
    one = regions(d, "00", {0})
    assert [(p.euler_char, p.genus, p.boundary_count) for p in one] == [(0, 0, 2)]
    both = regions(d, "00", {0, 1})
    assert sorted((p.euler_char, p.boundary_count) for p in both) == [(0, 2), (0, 2)]


def test_parallel_circles_are_one_isotopy_class(load_fixture):
    d = load_fixture("ex5")
    assert isotopy_classes(d, resolve(d, "00")) == [[0, 1]]
