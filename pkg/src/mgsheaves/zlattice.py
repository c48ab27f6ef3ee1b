"""Graded lattices inside vertex-indexed free modules.

A lattice M lives in the sum over vertices x of free modules F_x (the
"ambient" of x, given by generator degrees).  It is stored by a list of
homogeneous generators; each is a coordinate vector in the degree-d slice of
the sum, blocks ordered by vertex.  Everything downstream works one degree
at a time on these slices.

``gamma`` and ``localize`` go back and forth between sheaves and lattices;
``project_open`` and ``intersect_open`` give the image and the intersection
attached to a vertex subset; ``dualize`` takes the graded S-dual of a free
lattice, realized on the graph with reversed order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import sympy
from gmpy2 import mpq
from sympy.polys.matrices import DomainMatrix

from . import graded
from .linalg import Echelon, kernel_basis, solve
from .momentgraph import MomentGraph, SubgraphSelector, UP, normalize_direction, open_subgraphs, reverse_order
from .polyalg import Polynomial, _monomials, _reduced_index, _reduced_monomials
from .sheaf import (
    GLOBAL_DEGREE_CAP,
    Sheaf,
    costalk,
    is_flabby_up_to,
    section_space,
    section_vector,
)

ZERO = mpq(0)
SCHEMA_VERSION = 1
DEFAULT_WINDOW = 4


class NotFree(ValueError):
    pass


class NotSections(ValueError):
    pass


class ZLattice:
    def __init__(self, graph: MomentGraph, ambient_shifts, generators, degree_cap: int, saturated: bool = True):
        self.graph = graph
        self.n = graph.ring.n
        self.ambient_shifts = tuple(tuple(s) for s in ambient_shifts)
        self.generators = [(deg, list(vec)) for deg, vec in generators]
        self.degree_cap = degree_cap
        self.saturated = saturated
        self._slices: dict = {}

    @property
    def ambient_ranks(self) -> tuple:
        return tuple(len(s) for s in self.ambient_shifts)

    @property
    def low(self) -> int:
        return min((deg for deg, _ in self.generators), default=0)

    def degrees(self, upto: int | None = None) -> range:
        upto = self.degree_cap if upto is None else upto
        return range(self.low, upto + 1, 2)

    def __repr__(self):
        return f"ZLattice(ranks={self.ambient_ranks}, generators={[d for d, _ in self.generators]})"

    # ----- coordinates -------------------------------------------------

    def block_dims(self, d: int) -> list:
        return [graded.free_dim(self.n, s, d) for s in self.ambient_shifts]

    def offsets(self, d: int) -> list:
        out, total = [], 0
        for dim in self.block_dims(d):
            out.append(total)
            total += dim
        return out

    def total_dim(self, d: int) -> int:
        return sum(self.block_dims(d))

    def block(self, vec, x: int, d: int) -> list:
        off = self.offsets(d)[x]
        return list(vec[off:off + self.block_dims(d)[x]])

    def mult_var(self, vec, d: int, var: int) -> list:
        """Multiply a degree d-2 vector by a variable."""
        out = [ZERO] * self.total_dim(d)
        src_off = self.offsets(d - 2)
        dst_off = self.offsets(d)
        src_dims = self.block_dims(d - 2)
        for x, shifts in enumerate(self.ambient_shifts):
            if not src_dims[x]:
                continue
            imap = graded.free_mult(self.n, shifts, d, var)
            so, do = src_off[x], dst_off[x]
            for i in range(src_dims[x]):
                c = vec[so + i]
                if c:
                    out[do + imap[i]] += c
        return out

    def times_s2(self, rows, d: int) -> list:
        return [self.mult_var(r, d, var) for var in range(self.n) for r in rows]

    def slice(self, d: int) -> list:
        """Echelon basis of the degree-d part of the lattice."""
        if d in self._slices:
            return self._slices[d]
        if d < self.low or d % 2 != self.low % 2:
            return []
        prev = self.slice(d - 2) if d - 2 >= self.low else []
        ech = Echelon.from_rows(self.times_s2(prev, d), self.total_dim(d))
        for deg, vec in self.generators:
            if deg == d:
                ech.add(vec)
        rows = [list(r) for r in ech.rows]
        self._slices[d] = rows
        return rows

    def dim(self, d: int) -> int:
        return len(self.slice(d))

    def dims(self, degrees=None) -> dict:
        degrees = self.degrees() if degrees is None else degrees
        return {d: self.dim(d) for d in degrees}

    def min_generators(self, upto: int | None = None) -> list:
        out = []
        for d in self.degrees(upto):
            prev = self.slice(d - 2) if d - 2 >= self.low else []
            ech = Echelon.from_rows(self.times_s2(prev, d), self.total_dim(d))
            for deg, vec in self.generators:
                if deg == d and ech.add(vec):
                    out.append((deg, list(vec)))
        return out

    def generator_degrees(self, upto: int | None = None) -> list:
        return [d for d, _ in self.min_generators(upto)]

    def is_free(self, upto: int | None = None) -> bool:
        gens = self.generator_degrees(upto)
        degs = list(self.degrees(upto))
        return graded.free_dims(self.n, gens, degs) == [self.dim(d) for d in degs]

    def graded_rank(self, upto: int | None = None) -> dict:
        out: dict = {}
        for d in self.generator_degrees(upto):
            out[d // 2] = out.get(d // 2, 0) + 1
        return dict(sorted(out.items()))

    # ----- serialization -------------------------------------------------

    def generator_polynomials(self, deg: int, vec) -> list:
        ring = self.graph.ring
        out = []
        offs = self.offsets(deg)
        for x, shifts in enumerate(self.ambient_shifts):
            comps = [Polynomial(ring) for _ in shifts]
            for j, off, k in graded.free_layout(self.n, shifts, deg):
                mons = _monomials(self.n, k)
                terms = {m: vec[offs[x] + off + i] for i, m in enumerate(mons) if vec[offs[x] + off + i]}
                comps[j] = Polynomial(ring, terms)
            out.append(comps)
        return out

    def to_json(self) -> dict:
        g = self.graph
        return {
            "schema_version": SCHEMA_VERSION,
            "ambient": [{"vertex": g.names[x], "shifts": list(s)} for x, s in enumerate(self.ambient_shifts)],
            "degree_cap": self.degree_cap,
            "saturated": self.saturated,
            "generators": [
                {
                    "degree": deg,
                    "components": {
                        g.names[x]: [p.to_json() for p in comps]
                        for x, comps in enumerate(self.generator_polynomials(deg, vec))
                        if any(not p.is_zero() for p in comps)
                    },
                }
                for deg, vec in self.generators
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_polynomials(cls, graph: MomentGraph, ambient_shifts, generators, degree_cap: int) -> "ZLattice":
        """Build from generators given as ``(degree, {vertex: [polynomials]})``."""
        lat = cls(graph, ambient_shifts, [], degree_cap)
        gens = []
        for deg, comps in generators:
            vec = [ZERO] * lat.total_dim(deg)
            offs = lat.offsets(deg)
            for v, polys in comps.items():
                x = graph.vertex(v)
                layout = graded.block_offsets(graded.free_layout(lat.n, lat.ambient_shifts[x], deg))
                for j, p in enumerate(polys):
                    if p.is_zero():
                        continue
                    off, k = layout[j]
                    index = {m: i for i, m in enumerate(_monomials(lat.n, k))}
                    for e, c in p.terms.items():
                        vec[offs[x] + off + index[e]] = c
            gens.append((deg, vec))
        lat.generators = gens
        return lat

    @classmethod
    def from_json(cls, doc: dict, graph: MomentGraph) -> "ZLattice":
        ring = graph.ring
        shifts = [()] * len(graph)
        for entry in doc["ambient"]:
            shifts[graph.index[entry["vertex"]]] = tuple(entry["shifts"])
        gens = []
        for g in doc["generators"]:
            comps = {name: [Polynomial.from_json(ring, p) for p in polys] for name, polys in g["components"].items()}
            gens.append((g["degree"], comps))
        lat = cls.from_polynomials(graph, shifts, gens, doc["degree_cap"])
        lat.saturated = doc.get("saturated", True)
        return lat


# ----- gamma ----------------------------------------------------------------


def _auto_cap(graph: MomentGraph, shifts, window: int) -> int:
    support = [v for v in range(len(graph)) if shifts[v]]
    if not support:
        return 0
    lens = [graph.lengths[v] for v in support]
    top = max(s for v in support for s in shifts[v])
    return top + 2 * (max(lens) - min(lens)) + window


def gamma(sheaf: Sheaf, degree_cap: int | None = None, window: int = DEFAULT_WINDOW) -> ZLattice:
    """Global sections as a lattice, with minimal generators found degreewise."""
    g = sheaf.graph
    order = g.linear_extension(UP)
    everything = list(range(len(g)))
    shifts = sheaf.stalk_shifts
    low = min((s for st in shifts for s in st), default=0)
    cap = degree_cap if degree_cap is not None else _auto_cap(g, shifts, window)
    lat = ZLattice(g, shifts, [], cap)
    gens = []
    prev: list = []
    last = low
    d = low
    while d <= cap or (degree_cap is None and d <= last + window):
        if d > GLOBAL_DEGREE_CAP:
            break
        secs = [section_vector(sheaf, s, everything, d) for s in section_space(sheaf, order, d)]
        ech = Echelon.from_rows(lat.times_s2(prev, d), lat.total_dim(d))
        for vec in secs:
            if ech.add(vec):
                gens.append((d, vec))
                last = d
        prev = secs
        d += 2
    top = d - 2
    lat = ZLattice(g, shifts, gens, top, saturated=top >= last + window)
    return lat


def section_lattice(sheaf: Sheaf, generators, degree_cap: int) -> ZLattice:
    """A lattice from explicit generators, each of which must be a section."""
    lat = ZLattice.from_polynomials(sheaf.graph, sheaf.stalk_shifts, generators, degree_cap)
    g = sheaf.graph
    for deg, vec in lat.generators:
        for e, (a, b) in enumerate(g.edges):
            dim = sheaf.edge_dim(e, deg)
            if not dim:
                continue
            va = graded.apply_sparse(sheaf.restriction_matrix(a, e, deg), lat.block(vec, a, deg), dim)
            vb = graded.apply_sparse(sheaf.restriction_matrix(b, e, deg), lat.block(vec, b, deg), dim)
            if va != vb:
                raise NotSections(
                    f"generator of degree {deg} violates the condition on edge {g.names[a]}-{g.names[b]}"
                )
    return lat


# ----- localization -----------------------------------------------------------


class _Stalk:
    """The projection e_x M with chosen minimal generators inside F_x."""

    def __init__(self, lat: ZLattice, x: int):
        self.lat = lat
        self.x = x
        n = lat.n
        amb = lat.ambient_shifts[x]
        self.amb = amb
        self.gens = []  # (degree, vector in F_x slice)
        prev: list = []
        for d in lat.degrees():
            dim = graded.free_dim(n, amb, d)
            rows = []
            for var in range(n):
                imap = graded.free_mult(n, amb, d, var)
                rows.extend(graded.apply_index_map(imap, r, dim) for r in prev)
            ech = Echelon.from_rows(rows, dim)
            for deg, vec in lat.generators:
                if deg == d:
                    p = lat.block(vec, x, d)
                    if ech.add(p):
                        self.gens.append((d, p))
            prev = [list(r) for r in ech.rows]
        self.shifts = tuple(deg for deg, _ in self.gens)
        self._pcache: dict = {}

    def embedding(self, d: int) -> list:
        """Dense rows of the map from the free stalk slice into F_x at degree d."""
        if d in self._pcache:
            return self._pcache[d]
        n = self.lat.n
        dim = graded.free_dim(n, self.amb, d)
        cols = []
        for j, _, k in graded.free_layout(n, self.shifts, d):
            deg, vec = self.gens[j]
            for mono in _monomials(n, k):
                imap = graded.free_monomial_mult(n, self.amb, d, mono)
                cols.append(graded.apply_index_map(imap, vec, dim))
        rows = [[c[r] for c in cols] for r in range(dim)]
        self._pcache[d] = (rows, len(cols))
        return self._pcache[d]

    def coordinates(self, vectors, d: int) -> list:
        rows, ncols = self.embedding(d)
        if not vectors:
            return []
        if not ncols:
            if any(any(v) for v in vectors):
                raise AssertionError("projection outside the stalk")
            return [[] for _ in vectors]
        sols = solve(rows, vectors, ncols)
        if any(s is None for s in sols):
            raise AssertionError("projection outside the stalk")
        return sols


def localize(m: ZLattice) -> Sheaf:
    """The sheaf L(M): stalks e_x M, edge modules from the push-out."""
    g = m.graph
    n = m.n
    stalks = [_Stalk(m, x) for x in range(len(g))]
    stalk_shifts = [s.shifts for s in stalks]
    edge_shifts = [()] * len(g.edges)
    restrictions = {}
    flags = []
    for e, (x, y) in enumerate(g.edges):
        form = g.labels[e]
        coeffs = form.coefficients
        pivot = form.pivot
        sx, sy = stalks[x], stalks[y]
        if not sx.shifts and not sy.shifts:
            continue
        egens = []  # (side, generator index, degree)
        nspace = {}
        for d in m.degrees():
            nx = graded.free_dim(n, sx.shifts, d)
            ny = graded.free_dim(n, sy.shifts, d)
            if not nx + ny:
                nspace[d] = (Echelon(0), 0, 0)
                continue
            basis = m.slice(d)
            cx = sx.coordinates([m.block(u, x, d) for u in basis], d)
            cy = sy.coordinates([m.block(u, y, d) for u in basis], d)
            rows = [list(a) + [-c for c in b] for a, b in zip(cx, cy)]
            prev = m.slice(d - 2) if d - 2 >= m.low else []
            if prev:
                amb = m.ambient_shifts[x]
                dim = graded.free_dim(n, amb, d)
                scaled = []
                for u in prev:
                    ux = m.block(u, x, d - 2)
                    acc = [ZERO] * dim
                    for var, c in enumerate(coeffs):
                        if c:
                            imap = graded.free_mult(n, amb, d, var)
                            for i, a in enumerate(ux):
                                if a:
                                    acc[imap[i]] += c * a
                    scaled.append(acc)
                for a in sx.coordinates(scaled, d):
                    rows.append(list(a) + [ZERO] * ny)
            ech = Echelon.from_rows(rows, nx + ny)
            nspace[d] = (ech, nx, ny)
            # generator coordinates sit at the start of each degree-d block
            gen_coords = [(0, j, off) for j, off, k in graded.free_layout(n, sx.shifts, d) if k == 0]
            gen_coords += [(1, j, nx + off) for j, off, k in graded.free_layout(n, sy.shifts, d) if k == 0]
            span = Echelon(nx + ny)
            for r in ech.rows:
                span.add(r)
            genset = {c for _, _, c in gen_coords}
            for c in range(nx + ny):
                if c not in genset:
                    span.add([mpq(1) if i == c else ZERO for i in range(nx + ny)])
            for side, j, c in gen_coords:
                if span.add([mpq(1) if i == c else ZERO for i in range(nx + ny)]):
                    egens.append((side, j, d))
        tshifts = tuple(deg for _, _, deg in egens)
        edge_shifts[e] = tshifts
        # freeness over S/(label): compare quotient dimensions
        for d, (ech, nx, ny) in nspace.items():
            have = nx + ny - len(ech)
            want = graded.quotient_dim(n, pivot, tshifts, d)
            if have != want:
                flags.append({"edge": [g.names[x], g.names[y]], "degree": d, "quotient": have, "free_model": want})
        ring = g.ring
        for side, (v, st) in enumerate(((x, sx), (y, sy))):
            mat = [[Polynomial(ring) for _ in st.shifts] for _ in tshifts]
            for j, s in enumerate(st.shifts):
                ech, nx, ny = nspace[s]
                cols = []
                owners = []
                for i, (eside, ej, t) in enumerate(egens):
                    if t > s or (s - t) % 2:
                        continue
                    src = sx if eside == 0 else sy
                    layout = graded.block_offsets(graded.free_layout(n, src.shifts, s))
                    off, k = layout[ej]
                    base = off + (0 if eside == 0 else nx)
                    index = {mm: q for q, mm in enumerate(_monomials(n, k))}
                    for mono in _reduced_monomials(n, (s - t) // 2, pivot):
                        col = [ZERO] * (nx + ny)
                        col[base + index[mono]] = mpq(1)
                        cols.append(col)
                        owners.append((i, mono))
                ncols_phi = len(cols)
                cols.extend(ech.rows)
                target = [ZERO] * (nx + ny)
                lay = graded.block_offsets(graded.free_layout(n, st.shifts, s))
                target[lay[j][0] + (0 if side == 0 else nx)] = mpq(1)
                rows_m = [[c[r] for c in cols] for r in range(nx + ny)]
                sol = solve(rows_m, [target], len(cols))[0]
                if sol is None:
                    raise AssertionError("generator image outside the edge module")
                for (i, mono), c in zip(owners, sol[:ncols_phi]):
                    if c:
                        mat[i][j] = mat[i][j] + Polynomial(ring, {mono: c})
            restrictions[(v, e)] = mat
    sheaf = Sheaf(g, stalk_shifts, edge_shifts, restrictions)
    sheaf.localization_flags = flags
    return sheaf


# ----- open subsets ---------------------------------------------------------


def _vertex_set(graph, sel) -> frozenset:
    if isinstance(sel, SubgraphSelector):
        return sel.vertices
    return frozenset(graph.vertex(v) for v in sel)


def _mask(m: ZLattice, vec, keep: frozenset, d: int) -> list:
    out = list(vec)
    offs = m.offsets(d)
    dims = m.block_dims(d)
    for x in range(len(m.graph)):
        if x not in keep:
            for i in range(offs[x], offs[x] + dims[x]):
                out[i] = ZERO
    return out


def project_open(m: ZLattice, sel, direction=None) -> ZLattice:
    """The image of M in the coordinates of the chosen vertices."""
    keep = _vertex_set(m.graph, sel)
    gens = []
    for deg, vec in m.generators:
        v = _mask(m, vec, keep, deg)
        if any(v):
            gens.append((deg, v))
    return ZLattice(m.graph, m.ambient_shifts, gens, m.degree_cap, m.saturated)


def intersect_open(m: ZLattice, sel) -> ZLattice:
    """Elements of M supported on the chosen vertices."""
    keep = _vertex_set(m.graph, sel)
    gens = []
    sub = ZLattice(m.graph, m.ambient_shifts, [], m.degree_cap)
    prev: list = []
    for d in m.degrees():
        basis = m.slice(d)
        offs = m.offsets(d)
        dims = m.block_dims(d)
        outside = [i for x in range(len(m.graph)) if x not in keep for i in range(offs[x], offs[x] + dims[x])]
        rows = [[b[i] for b in basis] for i in outside]
        combos = kernel_basis(rows, len(basis)) if basis else []
        vecs = []
        for c in combos:
            v = [ZERO] * m.total_dim(d)
            for coef, b in zip(c, basis):
                if coef:
                    for i, a in enumerate(b):
                        if a:
                            v[i] += coef * a
            vecs.append(v)
        ech = Echelon.from_rows(sub.times_s2(prev, d), sub.total_dim(d))
        for v in vecs:
            if ech.add(v):
                gens.append((d, v))
        prev = vecs
    return ZLattice(m.graph, m.ambient_shifts, gens, m.degree_cap, m.saturated)


# ----- Verma flags --------------------------------------------------------------


@dataclass
class VermaFlagReport:
    direction: str
    degree_cap: int
    direct: bool
    criterion: bool
    flabby: bool
    costalks_free: bool
    non_free_open_sets: list = field(default_factory=list)
    non_free_costalks: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.direct == self.criterion

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "degree_cap": self.degree_cap,
            "direct": self.direct,
            "criterion": self.criterion,
            "flabby": self.flabby,
            "costalks_free": self.costalks_free,
            "agree": self.agree,
            "non_free_open_sets": self.non_free_open_sets,
            "non_free_costalks": self.non_free_costalks,
        }


def verma_flag_check(m: ZLattice, direction=UP, degree_cap: int | None = None, opens=None) -> VermaFlagReport:
    direction = normalize_direction(direction)
    cap = m.degree_cap if degree_cap is None else degree_cap
    g = m.graph
    if opens is None:
        opens = open_subgraphs(g, direction)
    bad_opens = []
    for sel in opens:
        if not project_open(m, sel).is_free(cap):
            bad_opens.append(sel.names())
    sheaf = localize(m)
    flabby = is_flabby_up_to(sheaf, direction, cap, opens)
    mode = "up" if direction == UP else "down"
    bad_costalks = []
    for x in sheaf.support():
        if not costalk(sheaf, x, mode, cap).free:
            bad_costalks.append(g.names[x])
    return VermaFlagReport(
        direction=direction,
        degree_cap=cap,
        direct=not bad_opens,
        criterion=flabby.ok and not bad_costalks,
        flabby=flabby.ok,
        costalks_free=not bad_costalks,
        non_free_open_sets=bad_opens,
        non_free_costalks=bad_costalks,
    )


# ----- duality ----------------------------------------------------------------


def _sympy_poly(p: Polynomial, syms):
    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for s, k in zip(syms, e):
            if k:
                term *= s ** k
        expr += term
    return expr


def _from_ring_element(elem, ring) -> Polynomial:
    terms = {}
    for exp, c in elem.terms():
        terms[tuple(exp)] = mpq(int(c.numerator), int(c.denominator))
    return Polynomial(ring, terms)


def dualize(m: ZLattice) -> ZLattice:
    """Graded S-dual of a free lattice, placed on the order-reversed graph.

    The dual basis is read off the inverse of the generator matrix over the
    fraction field; each vertex block is then scaled by the least common
    multiple of its denominators so that coordinates are polynomial again.
    """
    if not m.is_free():
        raise NotFree("dualize needs a graded free lattice; check it with verma_flag_check first")
    gens = m.min_generators()
    g = m.graph
    ring = g.ring
    coords = [(x, j) for x in range(len(g)) for j in range(len(m.ambient_shifts[x]))]
    if len(gens) != len(coords):
        raise NotFree("the minimal generators do not form a basis of the ambient space")
    k = len(gens)
    syms = sympy.symbols(ring.variable_names)
    field_ = sympy.QQ.frac_field(*syms)
    entries = [[None] * k for _ in range(k)]
    for col, (deg, vec) in enumerate(gens):
        comps = m.generator_polynomials(deg, vec)
        for row, (x, j) in enumerate(coords):
            entries[row][col] = field_.from_sympy(_sympy_poly(comps[x][j], syms))
    inv = DomainMatrix(entries, (k, k), field_).inv().to_list()
    dual_shifts = []
    dual_rows = [dict() for _ in range(k)]
    prng = field_.ring if hasattr(field_, "ring") else None
    for x in range(len(g)):
        idx = [r for r, (v, _) in enumerate(coords) if v == x]
        if not idx:
            dual_shifts.append(())
            continue
        lcm = None
        for i in range(k):
            for r in idx:
                den = inv[i][r].denom
                lcm = den if lcm is None else lcm.lcm(den)
        lcm = lcm.monic()
        gamma_deg = 2 * lcm.degree_total() if hasattr(lcm, "degree_total") else 2 * max(sum(e) for e in lcm.monoms())
        dual_shifts.append(tuple(-m.ambient_shifts[x][j] - gamma_deg for j in range(len(m.ambient_shifts[x]))))
        for i in range(k):
            polys = []
            for r in idx:
                f = inv[i][r]
                num = f.numer * lcm.exquo(f.denom)
                polys.append(_from_ring_element(num, ring))
            dual_rows[i][x] = polys
    del prng
    rev = reverse_order(g)
    top = max(d for d, _ in gens)
    gens_out = [(-deg, dual_rows[i]) for i, (deg, _) in enumerate(gens)]
    cap = max(-deg for deg, _ in gens) + (m.degree_cap - top)
    return ZLattice.from_polynomials(rev, dual_shifts, gens_out, cap)


def direct_sum(a: ZLattice, b: ZLattice) -> ZLattice:
    if a.graph is not b.graph:
        raise ValueError("direct sum needs lattices on the same graph")
    g = a.graph
    shifts = [sa + sb for sa, sb in zip(a.ambient_shifts, b.ambient_shifts)]
    gens = []
    for lat, first in ((a, True), (b, False)):
        for deg, vec in lat.generators:
            comps = {}
            polys = lat.generator_polynomials(deg, vec)
            for x in range(len(g)):
                zero_a = [Polynomial(g.ring) for _ in a.ambient_shifts[x]]
                zero_b = [Polynomial(g.ring) for _ in b.ambient_shifts[x]]
                comps[x] = polys[x] + zero_b if first else zero_a + polys[x]
            gens.append((deg, comps))
    return ZLattice.from_polynomials(g, shifts, gens, min(a.degree_cap, b.degree_cap))


# ----- shift comparisons ----------------------------------------------------------


@dataclass
class ShiftMatchReport:
    rows: list
    sigma: int | None
    verdict: str
    residuals: list

    @property
    def matched(self) -> bool:
        return self.verdict.startswith("match")

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "verdict": self.verdict, "rows": self.rows, "residuals": self.residuals}

    def render(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        width = max((len(r["vertex"]) for r in self.rows), default=6)
        for r in self.rows:
            lines.append(f"  {r['vertex']:<{width}}  {r['a']!s:<16} {r['b']!s}")
        return "\n".join(lines)


def compare_shifted(a: Sheaf, b: Sheaf, relabel=None) -> ShiftMatchReport:
    """Find one degree shift taking every stalk of ``a`` to the matching stalk of ``b``.

    ``relabel`` maps vertices of ``a`` to vertices of ``b``; a match with
    shift s means ``shifts(a_v) + s == shifts(b_relabel(v))`` for all v.
    """
    ga = a.graph
    rows = []
    sigma = None
    for v in range(len(ga)):
        w = relabel(v) if relabel is not None else v
        sa = sorted(a.stalk_shifts[v])
        sb = sorted(b.stalk_shifts[w])
        rows.append({"vertex": ga.names[v], "image": b.graph.names[w], "a": sa, "b": sb})
        if sigma is None and sa and sb:
            sigma = sb[0] - sa[0]
    residuals = []
    for r in rows:
        shifted = [s + (sigma or 0) for s in r["a"]]
        if shifted != r["b"]:
            residuals.append({"vertex": r["vertex"], "shifted_a": shifted, "b": r["b"]})
    if residuals:
        verdict = "mismatch"
    elif sigma is None:
        verdict = "match(any)"
    else:
        verdict = f"match({sigma})"
    return ShiftMatchReport(rows, sigma if not residuals else None, verdict, residuals)


# ----- Hom correspondence -------------------------------------------------------


@dataclass
class HomCorrespondenceReport:
    x: str
    y: str
    w0x: str
    w0y: str
    left_generators: list   # generator degrees of Hom(B_up(x), V(y))
    right_generators: list  # generator degrees of Hom(V(w0 y), B_down(w0 x))
    right_free: bool
    solver_agrees: bool
    sigma: int | None
    matched: bool

    @property
    def left_total(self) -> int:
        return len(self.left_generators)

    @property
    def right_total(self) -> int:
        return len(self.right_generators)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "w0x": self.w0x,
            "w0y": self.w0y,
            "left_generators": self.left_generators,
            "right_generators": self.right_generators,
            "left_total": self.left_total,
            "right_total": self.right_total,
            "right_free": self.right_free,
            "solver_agrees": self.solver_agrees,
            "sigma": self.sigma,
            "matched": self.matched,
        }


def verify_hom_correspondence(g: MomentGraph, x, y, policy=None, solver_degrees: int = 0) -> HomCorrespondenceReport:
    """Graded dimensions of Hom(B_up(x), V(y)) against Hom(V(w0 y), B_down(w0 x)).

    The left side is free on the negated stalk shifts of B_up(x) at y.  The
    right side is the full costalk of B_down(w0 x) at w0 y; its generators
    come from the kernel computation, and for the first ``solver_degrees``
    degrees its dimensions are cross-checked against the generic morphism
    solver.
    """
    from .bmp import bmp_family
    from .momentgraph import w0_relabel
    from .sheaf import hom_from_skyscraper, hom_to_skyscraper

    x, y = g.vertex(x), g.vertex(y)
    tau = w0_relabel(g)
    up = bmp_family(g, "up", policy)[x].sheaf
    down = bmp_family(g, "down", policy)[tau(x)].sheaf
    ty = tau(y)
    left = sorted(-s for s in up.stalk_shifts[y])
    shifts = down.stalk_shifts[ty]
    degree = len(g.incident[ty])
    cap = (max(shifts) if shifts else 0) + 2 * degree + 4
    co = costalk(down, ty, "all", cap)
    right = sorted(co.generator_degrees)
    solver_ok = True
    if solver_degrees:
        degs = range(0, 2 * solver_degrees, 2)
        solver_ok = hom_from_skyscraper(down, ty, degs) == {d: co.dims[d] for d in degs}
    sigma = None
    if left and right:
        sigma = right[0] - left[0]
    matched = [d + (sigma or 0) for d in left] == right and co.free
    if matched and sigma is not None:
        lo = min(left)
        lhs = hom_to_skyscraper(up, y, range(lo, lo + 2 * degree + 2, 2))
        matched = all(co.dims.get(i + sigma, v) == v for i, v in lhs.items() if i + sigma >= 0)
    return HomCorrespondenceReport(
        x=g.names[x], y=g.names[y], w0x=g.names[tau(x)], w0y=g.names[ty],
        left_generators=left, right_generators=right, right_free=co.free,
        solver_agrees=solver_ok, sigma=sigma, matched=matched,
    )
