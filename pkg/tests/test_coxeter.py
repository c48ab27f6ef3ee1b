from __future__ import annotations

from itertools import product

import pytest
from gmpy2 import mpq

from mgsheaves.coxeter import (
    GroupTooLarge,
    NotAntidominant,
    UnsupportedRootSystem,
    Weight,
    build_root_system,
    bruhat_leq,
    dot_action,
    generate_weyl,
    integral_subsystem,
    is_antidominant,
    longest_element,
    orbit_and_stabilizer,
    subword_leq,
    weight_leq,
    weyl_group,
)

CLASSICAL = {("A", 1): 1, ("A", 2): 3, ("A", 3): 6, ("A", 4): 10, ("B", 2): 4, ("B", 3): 9, ("C", 3): 9,
             ("D", 4): 12, ("G", 2): 6}
ORDERS = {("A", 1): 2, ("A", 2): 6, ("A", 3): 24, ("B", 2): 8, ("B", 3): 48, ("G", 2): 12, ("D", 4): 192}


def w(coords):
    return Weight([mpq(c) for c in coords])


@pytest.mark.parametrize("key,count", sorted(CLASSICAL.items()))
def test_positive_root_counts(key, count):
    assert len(build_root_system(*key).positive_roots) == count


def test_b2_long_short_pairing():
    rs = build_root_system("B", 2)
    c = rs.cartan_matrix
    assert sorted([abs(c[0][1]), abs(c[1][0])]) == [1, 2]


def test_cartan_pairing_convention():
    for key in CLASSICAL:
        rs = build_root_system(*key)
        for i, j in product(range(rs.rank), repeat=2):
            root_wt = rs.simple_roots[i]
            assert root_wt.pair(rs.simple_coroots[j]) == rs.cartan_matrix[j][i]


@pytest.mark.parametrize("bad", [("Z", 9), ("A", 7), ("B", 1), ("G", 3)])
def test_unsupported(bad):
    with pytest.raises(UnsupportedRootSystem):
        build_root_system(*bad)


@pytest.mark.parametrize("key,order", sorted(ORDERS.items()))
def test_group_orders_and_lengths(key, order):
    rs = build_root_system(*key)
    els = generate_weyl(rs)
    assert len(els) == order
    group = els[0].group
    for x in els:
        assert len(x.reduced_word) == x.length == group.inversion_count(x.index)


def test_a2_lengths_and_longest():
    rs = build_root_system("A", 2)
    els = generate_weyl(rs)
    assert sorted(x.length for x in els) == [0, 1, 1, 2, 2, 3]
    w0 = longest_element(els)
    assert w0.name == "s1s2s1" and (w0 * w0).length == 0
    assert longest_element(generate_weyl(build_root_system("B", 2))).length == 4
    assert longest_element(generate_weyl(build_root_system("A", 1))).name == "s1"


def test_cap_is_enforced():
    with pytest.raises(GroupTooLarge, match="5"):
        generate_weyl(build_root_system("A", 3), cap=5)


def test_bruhat_examples():
    g = weyl_group(build_root_system("A", 2))
    e, s1, s12, s21 = (g.from_name(n) for n in ("e", "s1", "s1s2", "s2s1"))
    assert all(bruhat_leq(e, x) for x in g.elements)
    assert bruhat_leq(s1, s12)
    assert not bruhat_leq(s12, s21) and not bruhat_leq(s21, s12)


@pytest.mark.parametrize("key", [("A", 2), ("B", 2), ("A", 3)])
def test_bruhat_matches_subword_oracle(key):
    g = weyl_group(build_root_system(*key))
    for x, y in product(g.elements, repeat=2):
        assert bruhat_leq(x, y) == subword_leq(x, y)
        if bruhat_leq(x, y) and x != y:
            assert x.length < y.length


def test_dot_action_examples():
    rs = build_root_system("A", 1)
    g = weyl_group(rs)
    assert dot_action(g.identity, w([-2])) == w([-2])
    assert dot_action(g.from_name("s1"), w([-2])) == w([0])


@pytest.mark.parametrize("key", [("A", 2), ("B", 2)])
def test_dot_action_is_an_action(key):
    rs = build_root_system(*key)
    g = weyl_group(rs)
    lam = w([-2] * rs.rank)
    lam2 = w([mpq(1, 2)] + [-1] * (rs.rank - 1))
    for x, y in product(g.elements, repeat=2):
        for mu in (lam, lam2):
            assert dot_action(x * y, mu) == dot_action(x, dot_action(y, mu))


def test_integral_subsystems():
    rs = build_root_system("A", 2)
    assert len(integral_subsystem(rs, w([-2, -2])).positive) == 3
    sub = integral_subsystem(rs, w([mpq(1, 2), 0]))
    assert [rs.positive_roots[i] for i in sub.positive] == [(0, 1)]
    sub = integral_subsystem(rs, w([mpq(1, 2), mpq(1, 2)]))
    assert [rs.positive_roots[i] for i in sub.positive] == [(1, 1)]


def test_orbits():
    rs = build_root_system("A", 1)
    orb = orbit_and_stabilizer(rs, w([-2]))
    assert sorted(tuple(x.coords) for x in orb.weights) == [(-2,), (0,)]
    assert len(orb.stabilizer) == 1
    rs = build_root_system("A", 2)
    assert len(orbit_and_stabilizer(rs, w([-2, -2])).weights) == 6
    orb = orbit_and_stabilizer(rs, w([-1, -3]))
    assert [r.name for r in orb.representatives] == ["e", "s2", "s1s2"]
    assert len(orb.stabilizer) == 2
    assert len(orb.weights) * len(orb.stabilizer) == 6
    with pytest.raises(NotAntidominant):
        orbit_and_stabilizer(rs, w([0, 0]))


def test_weight_order_and_antidominance():
    rs = build_root_system("A", 1)
    assert weight_leq(rs, w([-2]), w([-2]))
    assert weight_leq(rs, w([-2]), w([0]))
    rs = build_root_system("A", 2)
    a1 = rs.root_weight((1, 0))
    a2 = rs.root_weight((0, 1))
    mu = w([0, 0])
    nu = mu + a1 - a2
    assert not weight_leq(rs, mu, nu) and not weight_leq(rs, nu, mu)
    assert is_antidominant(rs, w([-2, -2]))
    assert not is_antidominant(rs, w([0, 0]))
    assert is_antidominant(rs, w([-1, -3]))


@pytest.mark.parametrize("key", [("A", 2), ("B", 2)])
def test_regular_weight_order_matches_bruhat(key):
    rs = build_root_system(*key)
    g = weyl_group(rs)
    lam = w([-2] * rs.rank)
    for x, y in product(g.elements, repeat=2):
        assert bruhat_leq(x, y) == weight_leq(rs, dot_action(x, lam), dot_action(y, lam))


def test_w0_conjugation_preserves_length():
    g = weyl_group(build_root_system("B", 3))
    w0 = g.longest()
    images = {(w0 * x * w0) for x in g.elements}
    assert len(images) == len(g)
    assert all((w0 * x * w0).length == x.length for x in g.elements)
