from __future__ import annotations

import json
from itertools import product

import pytest
import sympy

from mgsheaves import graded
from mgsheaves.bmp import bmp_family
from mgsheaves.fixtures import tripod_graph
from mgsheaves.momentgraph import DOWN, UP, SubgraphSelector, full, handcrafted, open_subgraphs
from mgsheaves.polyalg import reduce_mod_linear
from mgsheaves.sheaf import (
    DegreeCapExceeded,
    Sheaf,
    check_f_projective,
    costalk,
    hom_from_skyscraper,
    hom_to_skyscraper,
    is_flabby_up_to,
    sections,
    skyscraper,
    stalk_rank_poly,
    structure_algebra,
    structure_sheaf,
)

from conftest import block


def congruence_dims(g, degrees):
    """Oracle: solve z_a - z_b = label * h_E with sympy, one degree at a time."""
    n = g.ring.n
    syms = sympy.symbols(f"a1:{n + 1}")
    out = []
    for d in degrees:
        k = d // 2
        mons = sorted(sympy.itermonomials(syms, k, k), key=sympy.default_sort_key) if k else [sympy.Integer(1)]
        lower = (sorted(sympy.itermonomials(syms, k - 1, k - 1), key=sympy.default_sort_key)
                 if k > 1 else ([sympy.Integer(1)] if k == 1 else []))
        unknowns = []
        zs = []
        for v in range(len(g)):
            cs = sympy.symbols(f"z{v}_0:{len(mons)}")
            unknowns += cs
            zs.append(sum(c * m for c, m in zip(cs, mons)))
        eqs = []
        for e, (a, b) in enumerate(g.edges):
            lab = sum(int(c) * s for c, s in zip(g.labels[e].integer_vector(), syms))
            hs = sympy.symbols(f"h{e}_0:{len(lower)}") if lower else ()
            unknowns += hs
            h = sum(c * m for c, m in zip(hs, lower)) if lower else 0
            diff = sympy.Poly(sympy.expand(zs[a] - zs[b] - lab * h), *syms)
            eqs += diff.coeffs() if not diff.is_zero else []
        if eqs:
            m = sympy.Matrix([[sympy.diff(eq, u) for u in unknowns] for eq in eqs])
            # h is determined by z, so solutions in (z, h) count sections
            out.append(len(unknowns) - m.rank())
        else:
            out.append(len(unknowns))
    return out


def test_structure_sheaf_a1(a1):
    s = structure_sheaf(a1)
    assert s.stalk_shifts == ((0,), (0,)) and s.edge_shifts == ((0,),)
    dims, basis = structure_algebra(a1, range(0, 11, 2))
    assert dims == [1, 2, 2, 2, 2, 2]
    assert basis.satisfies_conditions()


def test_structure_algebra_matches_congruence_oracle(a2):
    dims, _ = structure_algebra(a2, range(0, 7, 2))
    assert dims == congruence_dims(a2, range(0, 7, 2)) == [1, 4, 9, 15]


def test_structure_algebra_of_disconnected_graph():
    g = handcrafted(2, ["p", "q"], [], [])
    dims, _ = structure_algebra(g, range(0, 7, 2))
    assert dims == [2 * graded.monomial_count(2, d) for d in range(0, 7, 2)]


@pytest.mark.parametrize("key", [("A", 1), ("A", 2), ("B", 2)])
def test_degree_zero_counts_components(key):
    dims, _ = structure_algebra(block(*key), range(0, 1, 2))
    assert dims == [1]


def test_sections_of_structure_sheaf_equal_structure_algebra(a2):
    dims, _ = structure_algebra(a2, range(0, 9, 2))
    assert list(sections(structure_sheaf(a2), full(a2), range(0, 9, 2)).dims().values()) == dims


def test_restrictions_are_reductions(a2):
    s = structure_sheaf(a2)
    for e, (a, b) in enumerate(a2.edges):
        x = a2.ring.var(0) * a2.ring.var(1)
        rows = s.restriction(a, e)
        assert reduce_mod_linear(rows[0][0] * x, a2.labels[e]) == reduce_mod_linear(x, a2.labels[e])


def test_skyscraper_sections(a2):
    sky = skyscraper(a2, "s1", 0)
    for sel in open_subgraphs(a2, UP):
        dims = sections(sky, sel, range(0, 7, 2)).dims()
        if a2.index["s1"] in sel.vertices:
            assert list(dims.values()) == [1, 2, 3, 4]
        else:
            assert set(dims.values()) == {0}
    assert all(not any(p for row in sky.restriction(v, e) for p in row)
               for e, (a, b) in enumerate(a2.edges) for v in (a, b))


def test_flabbiness(a1):
    assert is_flabby_up_to(structure_sheaf(a1), UP, 6).ok
    assert is_flabby_up_to(skyscraper(a1, "e"), UP, 6).ok
    rep = is_flabby_up_to(structure_sheaf(tripod_graph()), UP, 6)
    assert not rep.ok and rep.failures


def test_f_projectivity_controls(a1, a2):
    assert check_f_projective(structure_sheaf(a1), UP, 6).ok
    rep = check_f_projective(skyscraper(a1, "e"), UP, 6)
    assert not rep.ok and not rep.edge_iso
    assert check_f_projective(skyscraper(a1, "s1"), UP, 6).ok
    assert not check_f_projective(skyscraper(a2, "s1s2"), UP, 6).ok


def test_stalk_rank_poly(a1):
    assert stalk_rank_poly(structure_sheaf(a1), "e") == {0: 1}
    sky = skyscraper(a1, "s1", 2)
    assert stalk_rank_poly(sky, "s1") == {1: 1} and stalk_rank_poly(sky, "e") == {}


def test_costalks(a1):
    s = structure_sheaf(a1)
    rep = costalk(s, "e", "up", 8)
    assert [rep.dims[d] for d in range(0, 9, 2)] == [0, 1, 1, 1, 1]
    assert rep.generator_degrees == [2] and rep.free
    top = costalk(s, "s1", "up", 8)
    assert [top.dims[d] for d in range(0, 9, 2)] == [1] * 5
    sky = costalk(skyscraper(a1, "e"), "e", "all", 6)
    assert [sky.dims[d] for d in range(0, 7, 2)] == [1] * 4


def test_hom_to_skyscraper(a1):
    s = structure_sheaf(a1)
    assert hom_to_skyscraper(s, "s1", range(-2, 5, 2)) == {-2: 0, 0: 1, 2: 1, 4: 1}
    assert set(hom_to_skyscraper(skyscraper(a1, "e"), "s1").values()) == {0}


def test_hom_from_skyscraper_two_code_paths(a1, a2):
    sky = skyscraper(a1, "e")
    assert hom_from_skyscraper(sky, "e", range(-2, 5, 2)) == {-2: 0, 0: 1, 2: 1, 4: 1}
    s = structure_sheaf(a1)
    assert hom_from_skyscraper(s, "e", range(0, 7, 2)) == {0: 0, 2: 1, 4: 1, 6: 1}
    for r in bmp_family(a2, DOWN):
        for y in range(len(a2)):
            co = costalk(r.sheaf, y, "all", 6)
            assert hom_from_skyscraper(r.sheaf, y, range(0, 7, 2)) == {d: co.dims[d] for d in range(0, 7, 2)}


@pytest.mark.parametrize("key", [("A", 2), ("B", 2)])
def test_edge_modules_killed_by_label(key):
    g = block(*key)
    for direction in (UP, DOWN):
        for r in bmp_family(g, direction):
            sh = r.sheaf
            for e, shifts in enumerate(sh.edge_shifts):
                coeffs = g.labels[e].coefficients
                for d in range(0, 9, 2):
                    dim = sh.edge_dim(e, d)
                    total = [[0] * dim for _ in range(graded.quotient_dim(g.ring.n, g.labels[e].pivot, shifts, d - 2))]
                    for k, c in enumerate(coeffs):
                        if not c:
                            continue
                        exp = tuple(1 if i == k else 0 for i in range(g.ring.n))
                        for i, col in enumerate(graded.quotient_mult(coeffs, shifts, d, exp)):
                            for row, a in col:
                                total[i][row] += c * a
                    assert all(v == 0 for row in total for v in row)


def test_json_round_trip(a2):
    for r in bmp_family(a2, UP):
        doc = json.loads(r.sheaf.dumps())
        assert doc["schema_version"] == 1
        assert Sheaf.from_json(doc, a2) == r.sheaf


def test_degree_cap_enforced(a1):
    with pytest.raises(DegreeCapExceeded):
        sections(structure_sheaf(a1), None, [42])
