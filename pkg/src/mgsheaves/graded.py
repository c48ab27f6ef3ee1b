"""Degree slices of graded free modules over S and over S/(form).

A graded free module is described by its tuple of generator degrees
(``shifts``).  Its degree-d slice has coordinates ordered generator by
generator, each block using the lexicographic monomial basis of S_{d-s}
(or of the pivot-free monomials for a quotient).  Linear maps between
slices are returned as sparse column lists: ``cols[i]`` is a list of
``(row, coefficient)`` pairs giving the image of source coordinate ``i``.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

from .polyalg import (
    _monomial_index,
    _monomials,
    _reduce_monomial,
    _reduced_index,
    _reduced_monomials,
)

ONE = mpq(1)


@lru_cache(maxsize=None)
def free_layout(n: int, shifts: tuple, d: int) -> tuple:
    """Blocks ``(generator, offset, monomial degree)`` of the degree-d slice."""
    out = []
    off = 0
    for j, s in enumerate(shifts):
        k2 = d - s
        if k2 < 0 or k2 % 2:
            continue
        out.append((j, off, k2 // 2))
        off += len(_monomials(n, k2 // 2))
    return tuple(out)


@lru_cache(maxsize=None)
def free_dim(n: int, shifts: tuple, d: int) -> int:
    return sum(len(_monomials(n, k)) for _, _, k in free_layout(n, shifts, d))


@lru_cache(maxsize=None)
def quotient_layout(n: int, pivot: int, shifts: tuple, d: int) -> tuple:
    out = []
    off = 0
    for j, s in enumerate(shifts):
        k2 = d - s
        if k2 < 0 or k2 % 2:
            continue
        out.append((j, off, k2 // 2))
        off += len(_reduced_monomials(n, k2 // 2, pivot))
    return tuple(out)


@lru_cache(maxsize=None)
def quotient_dim(n: int, pivot: int, shifts: tuple, d: int) -> int:
    return sum(len(_reduced_monomials(n, k, pivot)) for _, _, k in quotient_layout(n, pivot, shifts, d))


def block_offsets(layout) -> dict:
    return {j: (off, k) for j, off, k in layout}


@lru_cache(maxsize=None)
def free_mult(n: int, shifts: tuple, d: int, var: int) -> tuple:
    """Multiplication by variable ``var`` from slice d-2 to slice d (index map)."""
    src = block_offsets(free_layout(n, shifts, d - 2))
    dst = block_offsets(free_layout(n, shifts, d))
    out = []
    for j, (off, k) in sorted(src.items(), key=lambda t: t[1][0]):
        doff, dk = dst[j]
        index = _monomial_index(n, dk)
        for m in _monomials(n, k):
            e = list(m)
            e[var] += 1
            out.append(doff + index[tuple(e)])
    return tuple(out)


@lru_cache(maxsize=None)
def quotient_mult(coeffs: tuple, shifts: tuple, d: int, exp: tuple) -> tuple:
    """Multiplication by the monomial ``exp`` on a quotient slice.

    Maps the slice in degree ``d - 2|exp|`` to the slice in degree ``d``.
    """
    n = len(coeffs)
    pivot = next(i for i, c in enumerate(coeffs) if c)
    step = 2 * sum(exp)
    src = quotient_layout(n, pivot, shifts, d - step)
    dst = block_offsets(quotient_layout(n, pivot, shifts, d))
    out = []
    for j, off, k in src:
        doff, dk = dst[j]
        index = _reduced_index(n, dk, pivot)
        for m in _reduced_monomials(n, k, pivot):
            e = tuple(a + b for a, b in zip(m, exp))
            out.append(tuple((doff + index[e2], c) for e2, c in _reduce_monomial(coeffs, e)))
    return tuple(out)


@lru_cache(maxsize=None)
def reduction_map(coeffs: tuple, shifts: tuple, d: int) -> tuple:
    """The quotient map from a free slice onto the matching quotient slice."""
    n = len(coeffs)
    pivot = next(i for i, c in enumerate(coeffs) if c)
    src = free_layout(n, shifts, d)
    dst = block_offsets(quotient_layout(n, pivot, shifts, d))
    out = []
    for j, off, k in src:
        doff, dk = dst[j]
        index = _reduced_index(n, dk, pivot)
        for m in _monomials(n, k):
            out.append(tuple((doff + index[e2], c) for e2, c in _reduce_monomial(coeffs, m)))
    return tuple(out)


def apply_index_map(imap, vec, dim: int) -> list:
    out = [mpq(0)] * dim
    for i, c in enumerate(vec):
        if c:
            out[imap[i]] += c
    return out


def apply_sparse(cols, vec, dim: int) -> list:
    out = [mpq(0)] * dim
    for i, c in enumerate(vec):
        if c:
            for r, a in cols[i]:
                out[r] += c * a
    return out


def monomial_count(n: int, d: int) -> int:
    if d < 0 or d % 2:
        return 0
    return len(_monomials(n, d // 2))


def free_dims(n: int, shifts, degrees) -> list:
    shifts = tuple(sorted(shifts))
    return [free_dim(n, shifts, d) for d in degrees]


def generators_from_dims(n: int, dims: dict) -> list:
    """Generator degrees of a free module with the given slice dimensions.

    ``dims`` maps even degrees to dimensions over a contiguous range; the
    Hilbert series is multiplied by (1 - t^2)^n and the numerator read off.
    Returns ``None`` when the numerator has a negative coefficient.
    """
    degrees = sorted(dims)
    if not degrees:
        return []
    lo, hi = degrees[0], degrees[-1]
    series = {d: dims.get(d, 0) for d in range(lo, hi + 1, 2)}
    for _ in range(n):
        series = {d: series[d] - series.get(d - 2, 0) for d in series}
    gens = []
    for d in sorted(series):
        c = series[d]
        if c < 0:
            return None
        gens.extend([d] * c)
    return gens


@lru_cache(maxsize=None)
def free_monomial_mult(n: int, shifts: tuple, d: int, exp: tuple) -> tuple:
    """Multiplication by the monomial ``exp`` from slice d-2|exp| to slice d."""
    step = 2 * sum(exp)
    src = free_layout(n, shifts, d - step)
    dst = block_offsets(free_layout(n, shifts, d))
    out = []
    for j, off, k in src:
        doff, dk = dst[j]
        index = _monomial_index(n, dk)
        for m in _monomials(n, k):
            out.append(doff + index[tuple(a + b for a, b in zip(m, exp))])
    return tuple(out)
