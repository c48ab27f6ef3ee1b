from __future__ import annotations

import json

import pytest

from mgsheaves import zlattice as zl
from mgsheaves.bmp import bmp_family
from mgsheaves.fixtures import tripod_graph
from mgsheaves.momentgraph import DOWN, UP, SubgraphSelector, open_subgraphs, reverse_order, w0_relabel
from mgsheaves.polyalg import Polynomial
from mgsheaves.sheaf import sections, skyscraper, stalk_rank_poly, structure_sheaf
from mgsheaves.suites import affine_fit

from conftest import block


def polys(lat, deg, vec):
    return [[p.terms for p in comps] for comps in lat.generator_polynomials(deg, vec)]


def test_gamma_of_structure_sheaf_a1(a1):
    m = zl.gamma(structure_sheaf(a1))
    gens = m.min_generators()
    assert [d for d, _ in gens] == [0, 2]
    assert polys(m, *gens[0]) == [[{(0,): 1}], [{(0,): 1}]]
    (ce,), (cs,) = polys(m, *gens[1])
    # the degree-2 generator is (c a, c' a) with c != c'
    assert set(ce) <= {(1,)} and set(cs) <= {(1,)}
    assert ce.get((1,), 0) != cs.get((1,), 0)
    assert m.saturated and m.is_free()


def test_gamma_of_skyscraper(a2):
    m = zl.gamma(skyscraper(a2, "s2"))
    assert m.generator_degrees() == [0]
    loc = zl.localize(m)
    assert loc.shift_data() == skyscraper(a2, "s2").shift_data()


def test_gamma_of_a2_structure_lattice(a2):
    up_e = bmp_family(a2, UP)[0]
    m = zl.gamma(up_e.sheaf)
    assert m.generator_degrees() == [0, 2, 2, 4, 4, 6]
    assert m.graded_rank() == {0: 1, 1: 2, 2: 2, 3: 1}
    lengths = {}
    for v in range(len(a2)):
        lengths[a2.lengths[v]] = lengths.get(a2.lengths[v], 0) + 1
    assert m.graded_rank() == lengths


def test_localize_structure_lattice(a1):
    loc = zl.localize(zl.gamma(structure_sheaf(a1)))
    assert loc.shift_data() == (((0,), (0,)), ((0,),))
    assert loc.localization_flags == []


@pytest.mark.parametrize("key", [("A", 1), ("A", 2)])
def test_localize_recovers_bmp_sheaves(key):
    g = block(*key)
    for direction in (UP, DOWN):
        for r in bmp_family(g, direction):
            m = zl.gamma(r.sheaf)
            loc = zl.localize(m)
            assert loc.shift_data() == r.sheaf.shift_data()
            assert zl.gamma(loc, degree_cap=m.degree_cap).dims() == m.dims()


def test_open_constructions_a1(a1):
    m = zl.gamma(structure_sheaf(a1))
    everything = SubgraphSelector(a1, range(2))
    assert zl.project_open(m, everything).dims() == m.dims()
    assert zl.intersect_open(m, everything).dims() == m.dims()
    empty = SubgraphSelector(a1, [])
    assert set(zl.project_open(m, empty).dims().values()) == {0}
    assert zl.intersect_open(m, empty).generator_degrees() == []
    e_only = SubgraphSelector(a1, ["e"])
    image = zl.project_open(m, e_only)
    assert image.generator_degrees() == [0] and image.is_free()
    inside = zl.intersect_open(m, e_only)
    assert inside.generator_degrees() == [2]
    ((deg, vec),) = inside.min_generators()
    assert polys(inside, deg, vec)[1] == [{}]


@pytest.mark.parametrize("key", [("A", 1), ("A", 2)])
def test_images_on_open_sets_are_sections(key):
    g = block(*key)
    degrees = range(0, 13, 2)
    for direction in (UP, DOWN):
        opens = open_subgraphs(g, direction)
        for r in bmp_family(g, direction):
            m = zl.gamma(r.sheaf)
            loc = zl.localize(m)
            for sel in opens:
                assert zl.project_open(m, sel).dims(degrees) == sections(loc, sel, degrees).dims()


def test_verma_flag_examples(a1, a2):
    rep = zl.verma_flag_check(zl.gamma(structure_sheaf(a1)), UP)
    assert rep.direct and rep.criterion and rep.agree
    for direction in (UP, DOWN):
        for r in bmp_family(a2, direction):
            rep = zl.verma_flag_check(zl.gamma(r.sheaf), direction)
            assert rep.direct and rep.criterion


def test_non_section_generators_rejected(a1):
    ring = a1.ring
    one, zero = ring.one(), Polynomial(ring)
    with pytest.raises(zl.NotSections):
        zl.section_lattice(structure_sheaf(a1), [(0, {"e": [one], "s1": [one]}), (0, {"e": [one], "s1": [zero]})], 6)
    ok = zl.section_lattice(structure_sheaf(a1), [(0, {"e": [one], "s1": [one]})], 6)
    assert ok.generator_degrees() == [0]


def test_tripod_fails_the_criterion():
    g = tripod_graph()
    m = zl.gamma(structure_sheaf(g), degree_cap=10)
    rep = zl.verma_flag_check(m, UP)
    assert not rep.flabby and not rep.criterion
    assert not rep.direct and rep.agree
    bottom = zl.project_open(m, SubgraphSelector(g, ["m1", "m2", "m3"]))
    with pytest.raises(zl.NotFree, match="graded free"):
        zl.dualize(bottom)


def test_dual_of_a1_structure_lattice(a1):
    m = zl.gamma(structure_sheaf(a1))
    d = zl.dualize(m)
    assert d.graph is reverse_order(a1)
    assert sorted(d.generator_degrees()) == [-2, 0]
    assert d.ambient_shifts == ((-2,), (-2,))
    loc = zl.localize(d)
    assert [len(s) for s in loc.stalk_shifts] == [1, 1]
    # hand computation: dual basis of (1,1), (a,0) is (0,1), (1/a,-1/a); clearing a per vertex
    by_degree = {deg: polys(d, deg, vec) for deg, vec in d.min_generators()}
    assert by_degree[0] == [[{}], [{(1,): -1}]] or by_degree[0] == [[{}], [{(1,): 1}]]
    e_part, s_part = by_degree[-2]
    assert e_part[0][(0,)] == -s_part[0][(0,)]


def test_dual_of_skyscraper(a2):
    m = zl.gamma(skyscraper(a2, "s1"))
    d = zl.dualize(m)
    assert d.generator_degrees() == [0]
    loc = zl.localize(d)
    assert loc.shift_data() == skyscraper(a2, "s1").shift_data()


@pytest.mark.parametrize("key", [("A", 1), ("A", 2)])
def test_biduality(key):
    g = block(*key)
    for direction in (UP, DOWN):
        for r in bmp_family(g, direction):
            m = zl.gamma(r.sheaf)
            dd = zl.dualize(zl.dualize(m))
            assert dd.graph is g
            assert sorted(dd.generator_degrees()) == sorted(m.generator_degrees())


def test_dual_of_direct_sum(a2):
    fam = bmp_family(a2, UP)
    a, b = zl.gamma(fam[1].sheaf), zl.gamma(fam[3].sheaf)
    s = zl.direct_sum(a, b)
    assert sorted(s.generator_degrees()) == sorted(a.generator_degrees() + b.generator_degrees())
    ds = zl.dualize(s)
    da, db = zl.dualize(a), zl.dualize(b)
    assert sorted(ds.generator_degrees()) == sorted(da.generator_degrees() + db.generator_degrees())
    ls, la, lb = zl.localize(ds), zl.localize(da), zl.localize(db)
    for v in range(len(a2)):
        assert stalk_rank_poly(ls, v) == {
            k: stalk_rank_poly(la, v).get(k, 0) + stalk_rank_poly(lb, v).get(k, 0)
            for k in set(stalk_rank_poly(la, v)) | set(stalk_rank_poly(lb, v))}


@pytest.mark.parametrize("key", [("A", 1), ("A", 2)])
def test_euler_characteristic(key):
    g = block(*key)
    for direction in (UP, DOWN):
        for r in bmp_family(g, direction):
            m = zl.gamma(r.sheaf)
            loc = zl.localize(m)
            stalks = sum(len(s) for s in loc.stalk_shifts)
            assert sum(m.graded_rank().values()) == stalks


def test_compare_shifted_identity_and_a1(a1):
    s = structure_sheaf(a1)
    assert zl.compare_shifted(s, s).verdict == "match(0)"
    up_e = bmp_family(a1, UP)[0].sheaf
    dual = zl.localize(zl.dualize(zl.gamma(up_e)))
    rep = zl.compare_shifted(dual, up_e)
    assert rep.verdict == "match(2)" and rep.sigma == 2
    down_s = bmp_family(a1, DOWN)[1].sheaf
    relabeled = zl.compare_shifted(dual, down_s, relabel=w0_relabel(a1))
    assert relabeled.verdict == "match(2)"
    assert "verdict" in rep.render() and rep.to_json()["sigma"] == 2
    bad = zl.compare_shifted(structure_sheaf(a1), skyscraper(a1, "e"))
    assert bad.verdict == "mismatch" and bad.residuals


def test_a2_shift_family_is_affine(a2):
    points = []
    for x, r in enumerate(bmp_family(a2, UP)):
        rep = zl.compare_shifted(zl.localize(zl.dualize(zl.gamma(r.sheaf))), r.sheaf)
        assert rep.matched
        points.append((a2.lengths[x], rep.sigma))
    ok, intercept, slope = affine_fit(points)
    assert ok and abs(slope) == 2 and (intercept, slope) == (6, -2)


def test_hom_correspondence_small(a1):
    rep = zl.verify_hom_correspondence(a1, "e", "e", solver_degrees=3)
    assert rep.matched and rep.solver_agrees and rep.left_total == rep.right_total == 1
    outside = zl.verify_hom_correspondence(a1, "s1", "e")
    assert outside.left_total == outside.right_total == 0 and outside.matched


def test_lattice_json_round_trip(a2):
    m = zl.gamma(bmp_family(a2, DOWN)[4].sheaf)
    doc = json.loads(m.dumps())
    assert doc["schema_version"] == 1
    again = zl.ZLattice.from_json(doc, a2)
    assert again.dims() == m.dims()
    assert again.to_json() == m.to_json()
