"""Graded polynomial rings over the rationals.

Every variable has degree 2, so a polynomial of total degree k lives in ring
degree 2k.  Polynomials are sparse maps from exponent tuples to ``mpq``
scalars.  Degree slices are enumerated in descending lexicographic order of
exponent vectors (``x^2, xy, y^2`` for two variables), which fixes the
coordinate order of every degreewise linear-algebra computation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import gcd

from gmpy2 import mpq

GRADING_UNIT = 2


def Q(value) -> mpq:
    """Coerce ``value`` (int, str, Fraction, mpq) to an exact rational."""
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        f = Fraction(value.strip())
        return mpq(f.numerator, f.denominator)
    return mpq(value)


def format_q(value) -> str:
    value = mpq(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class PolyRing:
    """Polynomial ring in ``variable_count`` variables of degree 2."""

    __slots__ = ("variable_count", "variable_names")

    grading_unit = GRADING_UNIT

    def __init__(self, variable_count: int, variable_names=None):
        if variable_count < 1:
            raise ValueError("variable_count must be positive")
        if variable_names is None:
            variable_names = tuple(f"a{i + 1}" for i in range(variable_count))
        variable_names = tuple(variable_names)
        if len(variable_names) != variable_count:
            raise ValueError("need one name per variable")
        if len(set(variable_names)) != variable_count:
            raise ValueError("variable names must be distinct")
        self.variable_count = variable_count
        self.variable_names = variable_names

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.variable_names == other.variable_names

    def __hash__(self):
        return hash(self.variable_names)

    def __repr__(self):
        return f"PolyRing({self.variable_count}, {list(self.variable_names)})"

    @property
    def n(self) -> int:
        return self.variable_count

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {(0,) * self.n: mpq(1)})

    def constant(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.n: Q(c)})

    def var(self, i: int) -> "Polynomial":
        exp = [0] * self.n
        exp[i] = 1
        return Polynomial(self, {tuple(exp): mpq(1)})

    def gens(self):
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exp) -> "Polynomial":
        return Polynomial(self, {tuple(exp): mpq(1)})

    def slice_dim(self, d: int) -> int:
        """Dimension of the degree-``d`` slice (0 for odd or negative d)."""
        if d < 0 or d % 2:
            return 0
        return len(_monomials(self.n, d // 2))


@lru_cache(maxsize=None)
def _monomials(n: int, k: int) -> tuple:
    """Exponent vectors of total degree ``k`` in ``n`` variables, lex-descending."""
    out = []
    for combo in combinations_with_replacement(range(n), k):
        exp = [0] * n
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(n: int, k: int) -> dict:
    return {m: i for i, m in enumerate(_monomials(n, k))}


@lru_cache(maxsize=None)
def _reduced_monomials(n: int, k: int, pivot: int) -> tuple:
    return tuple(m for m in _monomials(n, k) if m[pivot] == 0)


@lru_cache(maxsize=None)
def _reduced_index(n: int, k: int, pivot: int) -> dict:
    return {m: i for i, m in enumerate(_reduced_monomials(n, k, pivot))}


def graded_component_basis(ring: PolyRing, d: int) -> list:
    """Monomials (exponent tuples) spanning the degree-``d`` slice of ``ring``."""
    if d % 2:
        raise ValueError("odd degree has empty basis by convention violation")
    if d < 0:
        raise ValueError("degree must be nonnegative")
    return list(_monomials(ring.n, d // 2))


class Polynomial:
    """Sparse polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms=None):
        self.ring = ring
        clean = {}
        if terms:
            for exp, c in terms.items():
                c = c if type(c) is type(mpq()) else Q(c)
                if c:
                    clean[tuple(exp)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, ring, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Ring degree of a homogeneous polynomial (-1 for zero)."""
        if not self.terms:
            return -1
        degs = {sum(e) for e in self.terms}
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        return GRADING_UNIT * degs.pop()

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = Q(other)
            if not c:
                return Polynomial._raw(self.ring, {})
            return Polynomial._raw(self.ring, {e: v * c for e, v in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self == self.ring.constant(other)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                name if k == 1 else f"{name}^{k}"
                for name, k in zip(self.ring.variable_names, e)
                if k
            )
            if not mono:
                parts.append(format_q(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_q(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_vector(self, d: int) -> list:
        """Coordinates in the degree-``d`` monomial basis."""
        index = _monomial_index(self.ring.n, d // 2)
        vec = [mpq(0)] * len(index)
        for e, c in self.terms.items():
            if 2 * sum(e) != d:
                raise ValueError(f"term {e} not of degree {d}")
            vec[index[e]] = c
        return vec

    @classmethod
    def from_vector(cls, ring: PolyRing, d: int, vec) -> "Polynomial":
        mons = _monomials(ring.n, d // 2)
        return cls._raw(ring, {m: mpq(c) for m, c in zip(mons, vec) if c})

    def to_json(self) -> dict:
        return {
            ",".join(map(str, e)): format_q(c)
            for e, c in sorted(self.terms.items(), reverse=True)
        }

    @classmethod
    def from_json(cls, ring: PolyRing, data: dict) -> "Polynomial":
        terms = {}
        for key, c in data.items():
            exp = tuple(int(t) for t in key.split(",")) if key else ()
            terms[exp] = Q(c)
        return cls(ring, terms)


class LinearForm:
    """A nonzero homogeneous degree-2 element, stored by its coefficients."""

    __slots__ = ("coefficients", "pivot")

    def __init__(self, coefficients):
        coefficients = tuple(Q(c) for c in coefficients)
        if not any(coefficients):
            raise ValueError("zero linear form")
        self.coefficients = coefficients
        self.pivot = next(i for i, c in enumerate(coefficients) if c)

    def __len__(self):
        return len(self.coefficients)

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"LinearForm({[format_q(c) for c in self.coefficients]})"

    def normalized(self) -> "LinearForm":
        """Primitive integer representative of the line, positive leading entry."""
        den = 1
        for c in self.coefficients:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coefficients]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        ints = [v // g for v in ints]
        if ints[self.pivot] < 0:
            ints = [-v for v in ints]
        return LinearForm(ints)

    def integer_vector(self) -> tuple:
        return tuple(int(c) for c in self.normalized().coefficients)

    def proportional(self, other: "LinearForm") -> bool:
        return self.normalized() == other.normalized()

    def as_polynomial(self, ring: PolyRing) -> Polynomial:
        if ring.n != len(self.coefficients):
            raise ValueError("ring/form size mismatch")
        return Polynomial(ring, {
            tuple(1 if j == i else 0 for j in range(ring.n)): c
            for i, c in enumerate(self.coefficients)
        })

    def substitution(self) -> dict:
        """The pivot variable written in the remaining variables, as a term map."""
        p = self.pivot
        cp = self.coefficients[p]
        n = len(self.coefficients)
        return {
            tuple(1 if j == i else 0 for j in range(n)): -c / cp
            for i, c in enumerate(self.coefficients)
            if i != p and c
        }


@lru_cache(maxsize=None)
def _pivot_power(coeffs: tuple, pivot: int, k: int) -> tuple:
    """Reduced form of x_pivot^k modulo the linear form, as sorted term tuple."""
    form = LinearForm(coeffs)
    n = len(coeffs)
    if k == 0:
        return (((0,) * n, mpq(1)),)
    sub = form.substitution()
    prev = dict(_pivot_power(coeffs, pivot, k - 1))
    out = {}
    for e1, c1 in prev.items():
        for e2, c2 in sub.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return tuple(sorted(out.items()))


@lru_cache(maxsize=200000)
def _reduce_monomial(coeffs: tuple, exp: tuple) -> tuple:
    pivot = next(i for i, c in enumerate(coeffs) if c)
    k = exp[pivot]
    if k == 0:
        return ((exp, mpq(1)),)
    rest = tuple(0 if i == pivot else a for i, a in enumerate(exp))
    return tuple(
        (tuple(a + b for a, b in zip(e, rest)), c)
        for e, c in _pivot_power(coeffs, pivot, k)
    )


def reduce_mod_linear(p: Polynomial, form: LinearForm) -> Polynomial:
    """Canonical representative of ``p`` in ``S / (form)``.

    The pivot variable (smallest index with nonzero coefficient) is eliminated
    by substitution, so the result never contains it.
    """
    if not isinstance(form, LinearForm):
        form = LinearForm(form)
    coeffs = form.coefficients
    out = {}
    for e, c in p.terms.items():
        for e2, c2 in _reduce_monomial(coeffs, e):
            v = out.get(e2, 0) + c * c2
            if v:
                out[e2] = v
            else:
                out.pop(e2, None)
    return Polynomial._raw(p.ring, out)


def reduced_slice_basis(ring: PolyRing, form: LinearForm, d: int) -> tuple:
    """Monomials of degree ``d`` free of the pivot variable of ``form``."""
    if d < 0 or d % 2:
        return ()
    return _reduced_monomials(ring.n, d // 2, form.pivot)


def reduced_slice_dim(ring: PolyRing, form: LinearForm, d: int) -> int:
    return len(reduced_slice_basis(ring, form, d))


def reduced_vector(p: Polynomial, form: LinearForm, d: int) -> list:
    """Coordinates of a reduced degree-``d`` polynomial in the quotient slice."""
    index = _reduced_index(p.ring.n, d // 2, form.pivot)
    vec = [mpq(0)] * len(index)
    for e, c in p.terms.items():
        vec[index[e]] = c
    return vec


def reduced_from_vector(ring: PolyRing, form: LinearForm, d: int, vec) -> Polynomial:
    mons = reduced_slice_basis(ring, form, d)
    return Polynomial._raw(ring, {m: mpq(c) for m, c in zip(mons, vec) if c})


def monomial_times(exp: tuple, p: Polynomial) -> Polynomial:
    return Polynomial._raw(p.ring, {
        tuple(a + b for a, b in zip(exp, e)): c for e, c in p.terms.items()
    })


def multiply_reduced(exp: tuple, p: Polynomial, form: LinearForm) -> Polynomial:
    """``reduce(x^exp * p)`` for ``p`` already free of the pivot variable."""
    coeffs = form.coefficients
    out = {}
    for e1, c1 in _reduce_monomial(coeffs, exp):
        for e2, c2 in p.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return Polynomial._raw(p.ring, out)


def variable_shift_matrix(n: int, d: int, var: int) -> list:
    """Index map of multiplication by variable ``var`` from slice d-2 to slice d."""
    src = _monomials(n, (d - 2) // 2)
    index = _monomial_index(n, d // 2)
    out = []
    for m in src:
        e = list(m)
        e[var] += 1
        out.append(index[tuple(e)])
    return out
