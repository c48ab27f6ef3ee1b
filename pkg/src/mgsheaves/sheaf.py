"""Sheaves on moment graphs, computed one degree at a time.

A sheaf stores, for each vertex, the generator degrees of its free stalk;
for each edge, the generator degrees of its free S/(label) module; and for
each (vertex, incident edge) a matrix of reduced polynomials.  Entry (i, j)
sends stalk generator j to a multiple of edge generator i and has degree
``stalk_shift[j] - edge_shift[i]``, so every restriction has degree zero.
Shifts are generator degrees: a stalk with shifts (0, 2) has graded rank
1 + q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import graded
from .linalg import Echelon, image_complement, kernel_basis, rank
from .momentgraph import UP, MomentGraph, SubgraphSelector, full, normalize_direction, open_subgraphs
from .polyalg import Polynomial, _monomials, _reduce_monomial, _reduced_index

SCHEMA_VERSION = 1
GLOBAL_DEGREE_CAP = 40
ZERO = mpq(0)


class DegreeCapExceeded(ValueError):
    pass


def _check_cap(d: int) -> None:
    if d > GLOBAL_DEGREE_CAP:
        raise DegreeCapExceeded(f"degree {d} exceeds the global degree cap {GLOBAL_DEGREE_CAP}")


class Sheaf:
    def __init__(self, graph: MomentGraph, stalk_shifts, edge_shifts, restrictions, validate: bool = True):
        self.graph = graph
        self.n = graph.ring.n
        self.stalk_shifts = tuple(tuple(s) for s in stalk_shifts)
        self.edge_shifts = tuple(tuple(s) for s in edge_shifts)
        self.restrictions = {k: tuple(tuple(row) for row in m) for k, m in restrictions.items()}
        self._rcache: dict = {}
        if validate:
            self.validate()

    # ----- structure ---------------------------------------------------

    def validate(self) -> None:
        g = self.graph
        if len(self.stalk_shifts) != len(g) or len(self.edge_shifts) != len(g.edges):
            raise ValueError("shift data does not match the graph")
        for s in self.stalk_shifts + self.edge_shifts:
            if any(x % 2 for x in s):
                raise ValueError("shifts must be even")
        for e, (a, b) in enumerate(g.edges):
            form = g.labels[e]
            for v in (a, b):
                m = self.restriction(v, e)
                if len(m) != len(self.edge_shifts[e]) or any(len(r) != len(self.stalk_shifts[v]) for r in m):
                    raise ValueError(f"restriction ({g.names[v]}, edge {e}) has the wrong shape")
                for i, row in enumerate(m):
                    for j, p in enumerate(row):
                        if p.is_zero():
                            continue
                        if any(exp[form.pivot] for exp in p.terms):
                            raise ValueError("restriction entry not reduced modulo its edge label")
                        want = self.stalk_shifts[v][j] - self.edge_shifts[e][i]
                        if not p.is_homogeneous() or p.degree() != want:
                            raise ValueError("restriction entry has the wrong degree")

    def restriction(self, v: int, e: int) -> tuple:
        m = self.restrictions.get((v, e))
        if m is None:
            zero = Polynomial(self.graph.ring)
            return tuple(tuple(zero for _ in self.stalk_shifts[v]) for _ in self.edge_shifts[e])
        return m

    def stalk_rank(self, v) -> int:
        return len(self.stalk_shifts[self.graph.vertex(v)])

    def support(self) -> list:
        return [v for v in range(len(self.graph)) if self.stalk_shifts[v]]

    def stalk_dim(self, v: int, d: int) -> int:
        return graded.free_dim(self.n, self.stalk_shifts[v], d)

    def edge_dim(self, e: int, d: int) -> int:
        return graded.quotient_dim(self.n, self.graph.labels[e].pivot, self.edge_shifts[e], d)

    def restriction_matrix(self, v: int, e: int, d: int) -> tuple:
        """Sparse columns of the degree-d restriction from stalk ``v`` to edge ``e``."""
        key = (v, e, d)
        hit = self._rcache.get(key)
        if hit is not None:
            return hit
        n = self.n
        form = self.graph.labels[e]
        coeffs = form.coefficients
        pivot = form.pivot
        src = graded.free_layout(n, self.stalk_shifts[v], d)
        dst = graded.block_offsets(graded.quotient_layout(n, pivot, self.edge_shifts[e], d))
        m = self.restriction(v, e)
        cols = []
        for j, _, k in src:
            entries = [(i, m[i][j]) for i in range(len(m)) if not m[i][j].is_zero()]
            for mono in _monomials(n, k):
                col = {}
                for i, p in entries:
                    doff, dk = dst[i]
                    index = _reduced_index(n, dk, pivot)
                    for e2, c2 in p.terms.items():
                        ex = tuple(a + b for a, b in zip(mono, e2))
                        for e3, c3 in _reduce_monomial(coeffs, ex):
                            r = doff + index[e3]
                            col[r] = col.get(r, ZERO) + c2 * c3
                cols.append(tuple((r, c) for r, c in sorted(col.items()) if c))
        out = tuple(cols)
        self._rcache[key] = out
        return out

    # ----- serialization -------------------------------------------------

    def to_json(self) -> dict:
        g = self.graph
        edges = []
        for e, (a, b) in enumerate(g.edges):
            edges.append({
                "source": g.names[a],
                "target": g.names[b],
                "label": list(g.labels[e].integer_vector()),
                "shifts": list(self.edge_shifts[e]),
                "restrictions": {
                    g.names[v]: [[p.to_json() for p in row] for row in self.restriction(v, e)]
                    for v in (a, b)
                },
            })
        return {
            "schema_version": SCHEMA_VERSION,
            "stalks": [{"vertex": g.names[v], "shifts": list(s)} for v, s in enumerate(self.stalk_shifts)],
            "edges": edges,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc: dict, graph: MomentGraph) -> "Sheaf":
        ring = graph.ring
        stalks = [()] * len(graph)
        for entry in doc["stalks"]:
            stalks[graph.index[entry["vertex"]]] = tuple(entry["shifts"])
        edge_shifts = [()] * len(graph.edges)
        restrictions = {}
        for entry in doc["edges"]:
            e = graph.edge_between(entry["source"], entry["target"])
            edge_shifts[e] = tuple(entry["shifts"])
            for name, m in entry["restrictions"].items():
                restrictions[(graph.index[name], e)] = [[Polynomial.from_json(ring, p) for p in row] for row in m]
        return cls(graph, stalks, edge_shifts, restrictions)

    def __eq__(self, other):
        if not isinstance(other, Sheaf) or other.graph is not self.graph:
            return False
        if (self.stalk_shifts, self.edge_shifts) != (other.stalk_shifts, other.edge_shifts):
            return False
        return all(
            self.restriction(v, e) == other.restriction(v, e)
            for e, (a, b) in enumerate(self.graph.edges) for v in (a, b)
        )

    def shift_data(self) -> tuple:
        return (
            tuple(tuple(sorted(s)) for s in self.stalk_shifts),
            tuple(tuple(sorted(s)) for s in self.edge_shifts),
        )


def structure_sheaf(g: MomentGraph) -> Sheaf:
    one = g.ring.one()
    restrictions = {}
    for e, (a, b) in enumerate(g.edges):
        restrictions[(a, e)] = [[one]]
        restrictions[(b, e)] = [[one]]
    return Sheaf(g, [(0,)] * len(g), [(0,)] * len(g.edges), restrictions)


def skyscraper(g: MomentGraph, x, shift: int = 0) -> Sheaf:
    x = g.vertex(x)
    stalks = [()] * len(g)
    stalks[x] = (shift,)
    return Sheaf(g, stalks, [()] * len(g.edges), {})


# ----- sections ---------------------------------------------------------


def section_space(sheaf: Sheaf, vertices, d: int) -> list:
    """Basis of the degree-d sections over ``vertices`` (in the given order).

    A section is a dict from vertex to its coordinate vector; vertices whose
    component vanishes may be missing.  Vertices are added one at a time and
    the compatibility conditions along edges to earlier vertices are solved
    jointly with the coefficients of the earlier basis.
    """
    _check_cap(d)
    g = sheaf.graph
    done = set()
    basis: list = []
    for y in vertices:
        ny = sheaf.stalk_dim(y, d)
        cons = [e for e in g.incident[y] if g.other_end(e, y) in done and sheaf.edge_dim(e, d)]
        done.add(y)
        if not cons:
            for i in range(ny):
                vec = [ZERO] * ny
                vec[i] = mpq(1)
                basis.append({y: vec})
            continue
        offsets = []
        total = 0
        for e in cons:
            offsets.append(total)
            total += sheaf.edge_dim(e, d)
        columns = []
        for i in range(ny):
            col = [ZERO] * total
            for e, off in zip(cons, offsets):
                for r, c in sheaf.restriction_matrix(y, e, d)[i]:
                    col[off + r] += c
            columns.append(col)
        kept, moving = [], []
        for b in basis:
            col = [ZERO] * total
            nz = False
            for e, off in zip(cons, offsets):
                z = g.other_end(e, y)
                vec = b.get(z)
                if vec is None:
                    continue
                for i, c in enumerate(vec):
                    if c:
                        for r, a in sheaf.restriction_matrix(z, e, d)[i]:
                            col[off + r] -= c * a
                            nz = True
            if nz and any(col):
                columns.append(col)
                moving.append(b)
            else:
                kept.append(b)
        ncols = len(columns)
        rows = [[columns[c][r] for c in range(ncols)] for r in range(total)]
        new = []
        for kv in kernel_basis(rows, ncols):
            sec: dict = {}
            if ny and any(kv[:ny]):
                sec[y] = list(kv[:ny])
            for coef, b in zip(kv[ny:], moving):
                if not coef:
                    continue
                for v, vec in b.items():
                    acc = sec.get(v)
                    if acc is None:
                        sec[v] = [coef * c for c in vec]
                    else:
                        for i, c in enumerate(vec):
                            if c:
                                acc[i] += coef * c
            new.append(sec)
        basis = kept + new
    return basis


def section_vector(sheaf: Sheaf, sec: dict, vertices, d: int) -> list:
    """Flatten a section to coordinates over ``vertices`` (zero-filled)."""
    out = []
    for v in vertices:
        dim = sheaf.stalk_dim(v, d)
        vec = sec.get(v)
        out.extend(vec if vec is not None else [ZERO] * dim)
    return out


@dataclass
class SectionBasis:
    sheaf: Sheaf = field(repr=False)
    vertices: tuple
    by_degree: dict = field(repr=False)

    def dim(self, d: int) -> int:
        return len(self.by_degree.get(d, ()))

    def dims(self) -> dict:
        return {d: len(b) for d, b in sorted(self.by_degree.items())}

    def basis(self, d: int) -> list:
        return self.by_degree[d]

    def satisfies_conditions(self) -> bool:
        """Every basis element is compatible along every induced edge."""
        g = self.sheaf.graph
        vs = set(self.vertices)
        for d, secs in self.by_degree.items():
            for e, (a, b) in enumerate(g.edges):
                if a not in vs or b not in vs or not self.sheaf.edge_dim(e, d):
                    continue
                dim = self.sheaf.edge_dim(e, d)
                for sec in secs:
                    va = graded.apply_sparse(self.sheaf.restriction_matrix(a, e, d), sec.get(a, [ZERO] * self.sheaf.stalk_dim(a, d)), dim)
                    vb = graded.apply_sparse(self.sheaf.restriction_matrix(b, e, d), sec.get(b, [ZERO] * self.sheaf.stalk_dim(b, d)), dim)
                    if va != vb:
                        return False
        return True


def _ordered(g: MomentGraph, sel) -> tuple:
    if sel is None:
        vs = set(range(len(g)))
    elif isinstance(sel, SubgraphSelector):
        vs = set(sel.vertices)
    else:
        vs = {g.vertex(v) for v in sel}
    return tuple(v for v in g.linear_extension(UP) if v in vs)


def sections(sheaf: Sheaf, sel=None, degrees=range(0, 11, 2)) -> SectionBasis:
    order = _ordered(sheaf.graph, sel)
    by_degree = {d: section_space(sheaf, order, d) for d in degrees}
    return SectionBasis(sheaf, order, by_degree)


def structure_algebra(g: MomentGraph, degrees=range(0, 11, 2)):
    basis = sections(structure_sheaf(g), full(g), degrees)
    return [basis.dim(d) for d in degrees], basis


# ----- flabbiness and F-projectivity --------------------------------------


def _projection_rank(sheaf: Sheaf, secs, vertices, d: int) -> int:
    rows = [section_vector(sheaf, s, vertices, d) for s in secs]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    return rank(rows, len(rows[0]))


@dataclass
class FlabbyReport:
    ok: bool
    direction: str
    degree_cap: int
    open_sets_checked: int
    failures: list

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "direction": self.direction,
            "degree_cap": self.degree_cap,
            "open_sets_checked": self.open_sets_checked,
            "failures": self.failures,
        }


def is_flabby_up_to(sheaf: Sheaf, direction, degree_cap: int, opens=None, global_sections=None) -> FlabbyReport:
    """Surjectivity of global sections onto sections over each open set."""
    g = sheaf.graph
    direction = normalize_direction(direction)
    if opens is None:
        opens = open_subgraphs(g, direction)
    support = set(sheaf.support())
    failures = []
    seen = set()
    checked = 0
    whole = g.linear_extension(direction)
    for d in range(0, degree_cap + 1, 2):
        glob = global_sections[d] if global_sections else section_space(sheaf, whole, d)
        for sel in opens:
            # only the part of H meeting the support or its edges matters
            key = (frozenset(sel.vertices) & _closure(g, support), d)
            if key in seen:
                continue
            seen.add(key)
            checked += 1
            order = [v for v in whole if v in sel.vertices]
            local = len(section_space(sheaf, order, d))
            image = _projection_rank(sheaf, glob, order, d)
            if local != image:
                failures.append({"open_set": sel.names(), "degree": d, "sections": local, "image": image})
    return FlabbyReport(not failures, direction, degree_cap, checked, failures)


def _closure(g: MomentGraph, support) -> frozenset:
    out = set(support)
    for v in support:
        for e in g.incident[v]:
            out.add(g.other_end(e, v))
    return frozenset(out)


@dataclass
class ProjectivityReport:
    ok: bool
    direction: str
    degree_cap: int
    flabby: FlabbyReport
    generated: bool
    generation_failures: list
    edge_iso: bool
    edge_failures: list

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "direction": self.direction,
            "degree_cap": self.degree_cap,
            "flabby": self.flabby.to_json(),
            "generated_by_global_sections": self.generated,
            "generation_failures": self.generation_failures,
            "upward_edge_isomorphism": self.edge_iso,
            "edge_failures": self.edge_failures,
        }


def check_f_projective(sheaf: Sheaf, direction, degree_cap: int, opens=None) -> ProjectivityReport:
    g = sheaf.graph
    direction = normalize_direction(direction)
    whole = g.linear_extension(direction)
    glob = {d: section_space(sheaf, whole, d) for d in range(0, degree_cap + 1, 2)}
    flabby = is_flabby_up_to(sheaf, direction, degree_cap, opens, glob)
    gen_fail = []
    for d, secs in glob.items():
        for v in range(len(g)):
            dim = sheaf.stalk_dim(v, d)
            if not dim:
                continue
            r = _projection_rank(sheaf, secs, [v], d)
            if r != dim:
                gen_fail.append({"vertex": g.names[v], "degree": d, "stalk": dim, "image": r})
    edge_fail = []
    for v in range(len(g)):
        for e in g.incident[v]:
            y = g.other_end(e, v)
            if not g.working_leq(v, y, direction):
                continue
            for d in range(0, degree_cap + 1, 2):
                want = sheaf.stalk_dim(v, d) - sheaf.stalk_dim(v, d - 2)
                have = sheaf.edge_dim(e, d)
                cols = sheaf.restriction_matrix(v, e, d)
                r = _sparse_rank(cols, have)
                if not (want == have == r):
                    edge_fail.append({
                        "vertex": g.names[v], "edge": [g.names[t] for t in g.edges[e]], "degree": d,
                        "stalk_mod_label": want, "edge_module": have, "rank": r,
                    })
    ok = flabby.ok and not gen_fail and not edge_fail
    return ProjectivityReport(ok, direction, degree_cap, flabby, not gen_fail, gen_fail, not edge_fail, edge_fail)


def _sparse_rank(cols, nrows: int) -> int:
    if not cols or not nrows:
        return 0
    ech = Echelon(nrows)
    for col in cols:
        vec = [ZERO] * nrows
        for r, c in col:
            vec[r] += c
        ech.add(vec)
    return len(ech)


# ----- ranks, costalks and Hom spaces --------------------------------------


def stalk_rank_poly(sheaf: Sheaf, x) -> dict:
    """Graded rank at ``x`` as ``{q exponent: multiplicity}``; shift s gives q^(s/2)."""
    out: dict = {}
    for s in sheaf.stalk_shifts[sheaf.graph.vertex(x)]:
        out[s // 2] = out.get(s // 2, 0) + 1
    return dict(sorted(out.items()))


def format_rank_poly(poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for k, c in sorted(poly.items()):
        mon = "1" if k == 0 else ("q" if k == 1 else f"q^{k}")
        parts.append(mon if c == 1 else (f"{c}" if k == 0 else f"{c}{mon}"))
    return " + ".join(parts)


def _stalk_mult_rows(sheaf: Sheaf, v: int, d: int, rows) -> list:
    """S_2 times the given degree d-2 stalk vectors, as degree-d vectors."""
    out = []
    dim = sheaf.stalk_dim(v, d)
    for var in range(sheaf.n):
        imap = graded.free_mult(sheaf.n, sheaf.stalk_shifts[v], d, var)
        for r in rows:
            out.append(graded.apply_index_map(imap, r, dim))
    return out


@dataclass
class CostalkReport:
    vertex: str
    mode: str
    degree_cap: int
    dims: dict
    generator_degrees: list
    free: bool

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "mode": self.mode,
            "degree_cap": self.degree_cap,
            "dims": {str(k): v for k, v in self.dims.items()},
            "generator_degrees": self.generator_degrees,
            "free": self.free,
        }


def costalk_edges(sheaf: Sheaf, x: int, mode: str) -> list:
    g = sheaf.graph
    out = []
    for e in g.incident[x]:
        y = g.other_end(e, x)
        if mode == "all" or (mode == "up" and g.leq(x, y)) or (mode == "down" and g.leq(y, x)):
            out.append(e)
    return out


def costalk(sheaf: Sheaf, x, mode: str = "up", degree_cap: int = 12) -> CostalkReport:
    """Kernel of the stalk at ``x`` into the chosen incident edge modules."""
    if mode not in ("up", "down", "all"):
        raise ValueError(f"unknown costalk mode {mode!r}")
    g = sheaf.graph
    x = g.vertex(x)
    edges = costalk_edges(sheaf, x, mode)
    dims = {}
    gens = []
    prev: list = []
    for d in range(0, degree_cap + 1, 2):
        _check_cap(d)
        ncols = sheaf.stalk_dim(x, d)
        rows = []
        for e in edges:
            dim = sheaf.edge_dim(e, d)
            cols = sheaf.restriction_matrix(x, e, d)
            for r in range(dim):
                rows.append([ZERO] * ncols)
            base = len(rows) - dim
            for i, col in enumerate(cols):
                for r, c in col:
                    rows[base + r][i] += c
        ker = kernel_basis(rows, ncols) if ncols else []
        dims[d] = len(ker)
        sub = _stalk_mult_rows(sheaf, x, d, prev) if prev else []
        if ker:
            gens.extend([d] * len(image_complement(ker, sub, ncols)))
        prev = ker
    expected = graded.free_dims(sheaf.n, gens, range(0, degree_cap + 1, 2))
    free = expected == [dims[d] for d in range(0, degree_cap + 1, 2)]
    return CostalkReport(g.names[x], mode, degree_cap, dims, gens, free)


def hom_to_skyscraper(sheaf: Sheaf, y, degrees=range(-12, 13, 2)) -> dict:
    """Graded dims of morphisms into the skyscraper at ``y``.

    Such a morphism is any graded map from the stalk at ``y`` to S; a
    generator in degree s goes to S_{s+i} for a morphism of degree i.
    """
    shifts = sheaf.stalk_shifts[sheaf.graph.vertex(y)]
    return {i: sum(graded.monomial_count(sheaf.n, s + i) for s in shifts) for i in degrees}


def morphism_dims(source: Sheaf, target: Sheaf, degree: int) -> int:
    """Dimension of degree-``degree`` sheaf morphisms between two sheaves.

    Unknowns are the images of all stalk and edge-module generators; the
    equations say that restricting a stalk generator's image agrees with
    applying the edge map to its restriction.
    """
    g = source.graph
    unknowns = []  # (kind, index, generator, target degree, offset)
    total = 0
    for v in range(len(g)):
        for j, s in enumerate(source.stalk_shifts[v]):
            dim = target.stalk_dim(v, s + degree)
            unknowns.append(("v", v, j, s + degree, total))
            total += dim
    edge_offsets = {}
    for e in range(len(g.edges)):
        for i, t in enumerate(source.edge_shifts[e]):
            dim = target.edge_dim(e, t + degree)
            edge_offsets[(e, i)] = (total, t + degree)
            total += dim
    rows = []
    for e, (a, b) in enumerate(g.edges):
        form = g.labels[e]
        coeffs = form.coefficients
        for v in (a, b):
            src_m = source.restriction(v, e)
            for uk in unknowns:
                if uk[0] != "v" or uk[1] != v:
                    continue
                _, _, j, dd, off = uk
                edim = target.edge_dim(e, dd)
                if not edim:
                    continue
                # target restriction applied to the image of generator j
                tcols = target.restriction_matrix(v, e, dd)
                eq = [[ZERO] * total for _ in range(edim)]
                for c_i, col in enumerate(tcols):
                    for r, c in col:
                        eq[r][off + c_i] += c
                # minus edge map applied to the restriction of generator j
                for i in range(len(src_m)):
                    p = src_m[i][j]
                    if p.is_zero():
                        continue
                    eoff, edeg = edge_offsets[(e, i)]
                    for e2, c2 in p.terms.items():
                        mcols = graded.quotient_mult(coeffs, target.edge_shifts[e], dd, e2)
                        for c_i, col in enumerate(mcols):
                            for r, c in col:
                                eq[r][eoff + c_i] -= c2 * c
                rows.extend(eq)
    if not total:
        return 0
    return total - (rank(rows, total) if rows else 0)


def hom_from_skyscraper(sheaf: Sheaf, y, degrees=range(-12, 13, 2)) -> dict:
    """Graded dims of morphisms from the skyscraper at ``y`` (degree-0 generator)."""
    sky = skyscraper(sheaf.graph, y, 0)
    return {i: morphism_dims(sky, sheaf, i) for i in degrees}
