from __future__ import annotations

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mgsheaves.linalg import Echelon, RationalMatrix, image_complement, kernel, kernel_basis, rank, rref, solve


def q(rows):
    return [[mpq(x) for x in r] for r in rows]


def test_kernel_examples():
    assert kernel(RationalMatrix(q([[1, 0], [0, 1]]))) == []
    assert len(kernel(RationalMatrix(q([[0, 0, 0], [0, 0, 0]])))) == 3
    (v,) = kernel(RationalMatrix(q([[1, 1, 0], [0, 1, 1]])))
    assert [x / v[0] for x in v] == [1, -1, 1]


def test_image_complement_examples():
    assert image_complement(q([[1, 0], [0, 1]]), q([[1, 0], [0, 1]])) == []
    assert len(image_complement(q([[1, 0], [0, 1]]), [], 2)) == 2
    assert len(image_complement(q([[1, 0], [1, 1]]), q([[1, 1]]))) == 1
    with pytest.raises(ValueError, match="not a subspace"):
        image_complement(q([[1, 0]]), q([[0, 1]]))


matrices = st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=0, max_size=5).map(
        lambda rows: (rows, c)))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_nullity_and_sympy_oracle(data):
    rows, ncols = data
    m = q(rows)
    ker = kernel_basis(m, ncols)
    r = rank(m, ncols)
    assert r + len(ker) == ncols
    if rows:
        assert r == sympy.Matrix(rows).rank()
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_rref_is_idempotent(data):
    rows, ncols = data
    mat = RationalMatrix(q(rows), ncols)
    once = mat.rref()
    assert once.rref() == once


@settings(max_examples=40, deadline=None)
@given(matrices, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solve_reproduces_rhs(data, x):
    rows, ncols = data
    m = q(rows)
    x = [mpq(v) for v in x[:ncols]]
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    (sol,) = solve(m, [rhs], ncols)
    assert sol is not None
    assert [sum(a * b for a, b in zip(row, sol)) for row in m] == rhs


def test_echelon_membership():
    e = Echelon(3)
    assert e.add(q([[1, 2, 3]])[0])
    assert not e.add(q([[2, 4, 6]])[0])
    assert e.contains(q([[-1, -2, -3]])[0])
    assert not e.contains(q([[0, 0, 1]])[0])
    assert len(e) == 1
