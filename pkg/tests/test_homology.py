"""
Unit tests for homology.py against the golden reports shipped in fixtures/.

Planar goldens list rendered glyphs with their delta -> dim tables. On
closed surfaces glyph keys are lattice vectors, so those goldens give the
sorted multiset of (k, delta, dim) instead.
"""
import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
from complexes import PreconditionError, build_all_ct
from diagram_gen import random_closed_diagram, random_disk_tangle
from homology import (
    SectorDims,
    compare_reports,
    euler_check,
    homology_dims,
    homology_report,
    render_table,
    untwisted_homology,
)
from resolution import GlyphKey


def _golden(fixtures_dir, name):
    return json.loads((fixtures_dir / f"{name}.expected.json").read_text())


def _glyph_table(report):
    return {
        s.glyph.render(): {str(delta): n for delta, n in sorted(s.dims.items())}
        for s in report.nonzero()}


def _profile(report):
    return sorted([s.glyph.k, delta, n] for s in report.nonzero() for delta, n in s.dims.items())


GOLDEN = ["ex1", "ex2", "ex3", "ex5", "trefoil_annular", "kink_positive", "kink_negative", "hopf",
          "trefoil_right", "arc", "tangle_one_crossing"]


@pytest.mark.parametrize("name", GOLDEN)
def test_ct_homology_matches_golden(load_fixture, fixtures_dir, name):
    expected = _golden(fixtures_dir, name)
    report = homology_report(load_fixture(name), expected["which"])
    assert report.n_plus == expected["n_plus"]
    if "glyphs" in expected:
        assert _glyph_table(report) == expected["glyphs"]
    if "profile" in expected:
        assert _profile(report) == sorted(expected["profile"])


@pytest.mark.parametrize("name", ["ex1", "ex5", "kink_positive", "hopf", "arc", "tangle_one_crossing"])
def test_sk_and_ct_pipelines_agree(load_fixture, name):
    d = load_fixture(name)
    ok, message = compare_reports(homology_report(d, "SK"), homology_report(d, "CT"))
    assert ok, message


@pytest.mark.slow
@pytest.mark.parametrize("name", ["ex2", "ex3", "trefoil_right", "trefoil_annular"])
def test_sk_and_ct_pipelines_agree_on_larger_fixtures(load_fixture, name):
    report = homology_report(load_fixture(name), "both")
    assert report.kind == "CT"


def _random_diagram(seed):
    """Closed diagrams on even seeds, disk tangles on odd ones; at most 6 crossings."""
    rng = random.Random(seed)
    n = 1 + seed % 6
    if seed % 2 == 0:
        return random_closed_diagram(n, rng)
    if seed % 4 == 1:
        return random_disk_tangle(n, rng)
    return random_disk_tangle(max(n, 2), rng, arcs_only=False)


@pytest.mark.parametrize("seed", range(50))
def test_sk_and_ct_pipelines_agree_on_random_diagrams(seed):
    d = _random_diagram(seed)
    assert d.n <= 6
    report = homology_report(d, "both")
    assert report.kind == "CT"


@pytest.mark.slow
def test_genus_two_all_zero_resolution_sits_alone_in_its_colored_sector(load_fixture):
    d = load_fixture("ex4")
    sectors = build_all_ct(d, colored=True)
    codes = {s.code for c in sectors.values() for gens in c.generators.values() for s in gens}
    assert (0,) * 6 in codes
    assert (1,) * 6 not in codes
    key = next(k for k, c in sectors.items()
               if not k.entries and any(s.code == (0,) * 6 for gens in c.generators.values() for s in gens))
    assert sectors[key].chain_dims() == {0: 8}
    assert homology_dims(sectors[key]) == {0: 8}
    for c in sectors.values():
        assert len([n for n in homology_dims(c).values() if n]) <= 1


def test_example_two_gamma_sector_has_two_gradings(load_fixture):
    d = load_fixture("ex2")
    sectors = build_all_ct(d)
    key = next(k for k, c in sectors.items()
               if any(s.code == (0, 0) and s.decor == (1,) for gens in c.generators.values() for s in gens))
    assert key.k == 1
    dims = homology_dims(sectors[key])
    assert sorted(n for n in dims.values() if n) == [1, 1]
    a, b = sorted(delta for delta, n in dims.items() if n)
    assert b - a == 2


def test_euler_check_and_zero_dims(load_fixture):
    d = load_fixture("ex5")
    for c in build_all_ct(d).values():
        assert euler_check(c)


def test_colored_split_refines_the_uncolored_sectors(load_fixture):
    d = load_fixture("ex3")
    plain = homology_report(d, "CT")
    colored = homology_report(d, "CT", colored=True)
    merged = {}
    for s in colored.sectors:
        for delta, n in s.dims.items():
            key = (s.glyph.uncolored(), delta)
            merged[key] = merged.get(key, 0) + n
    assert merged == plain.table()


def test_colored_needs_ct(load_fixture):
    with pytest.raises(PreconditionError):
        homology_report(load_fixture("ex1"), "SK", colored=True)


def test_unknown_pipeline():
    with pytest.raises(ValueError):
        homology_report(None, "XX")


def test_compare_reports_names_first_difference(load_fixture):
    a = homology_report(load_fixture("ex5"), "CT")
    b = homology_report(load_fixture("ex3"), "CT")
    ok, message = compare_reports(a, b)
    assert not ok
    assert "delta" in message


def test_reidemeister_one_fixture_is_equivalent_up_to_class_relabeling(load_fixture):
    a = homology_report(load_fixture("ex5"), "CT")
    b = homology_report(load_fixture("ex5_r1"), "CT")
    assert not compare_reports(a, b)[0]
    ok, message = compare_reports(a, b, up_to_classes=True)
    assert ok, message
    assert "relabeling" in message


def test_class_relabeling_cannot_hide_a_dimension_difference(load_fixture):
    a = homology_report(load_fixture("ex5"), "CT")
    b = homology_report(load_fixture("ex3"), "CT")
    ok, message = compare_reports(a, b, up_to_classes=True)
    assert not ok
    assert message.startswith("no relabeling of curve classes matches")


def test_untwisted_homology_of_tangle(load_fixture):
    d = load_fixture("tangle_one_crossing")
    report = untwisted_homology(d)
    assert report.kind == "untwisted"
    assert _glyph_table(report) == {"trivial | 0-1 2-3": {"0": 1}, "trivial | 0-3 1-2": {"1": 1}}


def test_untwisted_homology_of_kink_survives(load_fixture):
    report = untwisted_homology(load_fixture("kink_positive"))
    assert sum(s.total for s in report.sectors) == 2


def test_report_json_and_table(load_fixture):
    report = homology_report(load_fixture("ex1"), "CT")
    data = report.to_json()
    assert data["n_plus"] == 2 and data["kind"] == "CT"
    assert {"glyph": [[[2], 1]], "dims": {"-2": 2}} in data["sectors"]
    text = render_table(report)
    assert "+2g(1) +1g(2)" in text
    assert "Skein homology (CT)" in text


def test_empty_table_rendering(load_fixture):
    text = render_table(homology_report(load_fixture("hopf"), "CT"))
    assert "(all sectors trivial)" in text


def test_sector_json_carries_matching_and_chi():
    s = SectorDims(GlyphKey((), ((0, 1),), -1), {0: 1})
    assert s.to_json() == {"glyph": [], "matching": [[0, 1]], "colored_chi": -1, "dims": {"0": 1}}
