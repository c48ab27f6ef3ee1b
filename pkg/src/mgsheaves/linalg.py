"""Exact rational linear algebra on dense row lists.

Vectors are Python lists of ``mpq``.  All routines are deterministic: pivots
are taken in increasing column order, and complements are chosen greedily in
the order the candidates are given.
"""

from __future__ import annotations

from gmpy2 import mpq

from .polyalg import Q, format_q

ZERO = mpq(0)
ONE = mpq(1)


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` holds only the nonzero rows and
    ``pivots[i]`` is the pivot column of ``R[i]``.
    """
    m = [[mpq(v) for v in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        row = m[r]
        inv = ONE / row[c]
        if inv != 1:
            row = [v * inv for v in row]
            m[r] = row
        nz = [j for j in range(c, ncols) if row[j]]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    other = m[i]
                    for j in nz:
                        other[j] -= f * row[j]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows, ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(Echelon.from_rows(rows, ncols if ncols is not None else len(rows[0])))


def kernel_basis(rows, ncols: int) -> list:
    """Null space basis in reduced echelon form, one vector per free column."""
    if not rows:
        return [[ONE if j == i else ZERO for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref(rows, ncols)
    pivset = set(pivots)
    out = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(R, pivots):
            if row[f]:
                v[p] = -row[f]
        out.append(v)
    return out


def solve(rows, rhs_list, ncols: int):
    """Particular solutions of ``A x = b`` for each ``b`` in ``rhs_list``.

    Returns a list with ``None`` wherever a system is inconsistent.
    """
    nrows = len(rows)
    if not rhs_list:
        return []
    k = len(rhs_list)
    aug = [list(rows[i]) + [b[i] for b in rhs_list] for i in range(nrows)]
    R, pivots = rref(aug, ncols + k) if aug else ([], [])
    out = []
    for t in range(k):
        col = ncols + t
        x = [ZERO] * ncols
        ok = True
        for row, p in zip(R, pivots):
            if p < ncols:
                x[p] = row[col]
            elif row[col]:
                # rows with zero coefficient part encode 0 = b-combination
                ok = False
        out.append(x if ok else None)
    return out


class Echelon:
    """Incrementally maintained reduced echelon basis of a subspace."""

    __slots__ = ("ncols", "rows", "pivots")

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows = []
        self.pivots = []

    @classmethod
    def from_rows(cls, rows, ncols: int) -> "Echelon":
        e = cls(ncols)
        for r in rows:
            e.add(r)
        return e

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec) -> list:
        v = [mpq(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            f = v[p]
            if f:
                for j in range(self.ncols):
                    if row[j]:
                        v[j] -= f * row[j]
        return v

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def add(self, vec) -> bool:
        """Insert ``vec``; returns False when it was already in the span."""
        v = self.reduce(vec)
        p = next((j for j, x in enumerate(v) if x), None)
        if p is None:
            return False
        inv = ONE / v[p]
        v = [x * inv for x in v]
        for row in self.rows:
            f = row[p]
            if f:
                for j in range(self.ncols):
                    if v[j]:
                        row[j] -= f * v[j]
        self.rows.append(v)
        self.pivots.append(p)
        return True


def image_complement(span_rows, sub_rows, ncols: int | None = None) -> list:
    """Vectors from ``span_rows`` completing a basis of ``sub`` to one of ``span``.

    Raises ``ValueError("not a subspace")`` when ``sub`` is not contained in
    the span of ``span_rows``.
    """
    if ncols is None:
        if span_rows:
            ncols = len(span_rows[0])
        elif sub_rows:
            ncols = len(sub_rows[0])
        else:
            return []
    span = Echelon.from_rows(span_rows, ncols)
    for v in sub_rows:
        if not span.contains(v):
            raise ValueError("not a subspace")
    e = Echelon.from_rows(sub_rows, ncols)
    out = []
    for v in span_rows:
        if e.add(v):
            out.append(list(v))
    return out


class RationalMatrix:
    """Immutable exact matrix; a thin wrapper over the row-list routines."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, cols: int | None = None):
        entries = tuple(tuple(Q(x) for x in row) for row in entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if any(len(r) != cols for r in entries):
            raise ValueError("ragged matrix")
        self.rows = len(entries)
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and (self.cols, self.entries) == (other.cols, other.entries)

    def __hash__(self):
        return hash((self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(format_q(x) for x in r) for r in self.entries)
        return f"RationalMatrix({self.rows}x{self.cols}: {body})"

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return RationalMatrix(
            [[sum((a * b for a, b in zip(r, c)), ZERO) for c in cols] for r in self.entries],
            other.cols,
        )

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([list(c) for c in zip(*self.entries)] if self.rows else [], self.rows)

    def rref(self) -> "RationalMatrix":
        R, _ = rref(self.entries, self.cols)
        R = R + [[ZERO] * self.cols for _ in range(self.rows - len(R))]
        return RationalMatrix(R, self.cols)

    def pivots(self) -> list:
        return rref(self.entries, self.cols)[1]

    def rank(self) -> int:
        return len(self.pivots())

    def kernel_basis(self) -> list:
        return kernel_basis([list(r) for r in self.entries], self.cols)


def kernel(m: RationalMatrix) -> list:
    return m.kernel_basis()
