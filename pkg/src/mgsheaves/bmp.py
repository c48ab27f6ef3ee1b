"""Braden-MacPherson sheaves built degree by degree.

The construction walks the vertices in a linear extension of the working
order (the graph order for ``up``, its reverse for ``down``).  At a vertex y
the new stalk is a minimal free cover of the image of the sections over the
processed vertices in the edge modules of the lower edges at y.  Instead of
recomputing section spaces, the code keeps a generating set of the sections
over the processed vertices: every generator is lifted to y through the new
stalk, and generators of the kernel at y are added.  Since the partial sheaf
is flabby, sections over the processed set have the same boundary image as
sections over the vertices strictly below y.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import graded
from .hecke import KLTable, kl_table
from .linalg import Echelon, kernel_basis, solve
from .momentgraph import MomentGraph, gkm_check, normalize_direction
from .polyalg import Polynomial, _monomials, _reduced_monomials
from .sheaf import Sheaf

ZERO = mpq(0)
DEFAULT_DEGREE_CAP = 24


class NotGKM(ValueError):
    pass


def _default_bound(delta_length: int) -> int:
    return 2 * delta_length


@dataclass(frozen=True)
class DegreeBoundPolicy:
    per_vertex_bound: object = _default_bound
    saturation_window: int = 4
    oracle_crosscheck: bool = True
    degree_cap: int = DEFAULT_DEGREE_CAP

    def bound(self, delta_length: int) -> int:
        b = self.per_vertex_bound(delta_length)
        if b < 0 or b % 2:
            raise ValueError("degree bounds must be nonnegative and even")
        return b


@dataclass
class BMPResult:
    sheaf: Sheaf
    base_vertex: str
    direction: str
    generator_degrees: dict
    saturated: bool
    provisional: bool
    degrees_computed: int
    last_generator_degree: int
    oracle: dict | None
    timings: dict = field(default_factory=dict, repr=False)

    @property
    def oracle_ok(self) -> bool:
        return self.oracle is None or not self.oracle["mismatches"]

    def to_json(self) -> dict:
        doc = self.sheaf.to_json()
        doc["base"] = self.base_vertex
        doc["direction"] = self.direction
        doc["diagnostics"] = {
            "generator_degrees": self.generator_degrees,
            "saturated": self.saturated,
            "provisional": self.provisional,
            "degrees_computed": self.degrees_computed,
            "last_generator_degree": self.last_generator_degree,
            "oracle": self.oracle,
        }
        return doc


class _EdgeSpace:
    """Coordinates of a direct sum of edge modules stalk_z / label in one degree."""

    def __init__(self, n, parts, d):
        # parts: list of (edge, lower vertex z, coeffs, pivot, shifts of z)
        self.offsets = []
        total = 0
        for _, _, _, pivot, shifts in parts:
            self.offsets.append(total)
            total += graded.quotient_dim(n, pivot, shifts, d)
        self.dim = total


def bmp(g: MomentGraph, direction, x, policy: DegreeBoundPolicy | None = None,
        order=None, oracle_table: KLTable | None = None) -> BMPResult:
    """The BMP sheaf for base vertex ``x`` in the given direction."""
    policy = policy or DegreeBoundPolicy()
    direction = normalize_direction(direction)
    gkm = gkm_check(g)
    if not gkm.ok:
        raise NotGKM(f"graph is not GKM: {gkm.witness}")
    x = g.vertex(x)
    n = g.ring.n
    if order is None:
        order = g.linear_extension(direction)
    order = list(order)
    pos = {v: i for i, v in enumerate(order)}
    wl = (lambda a, b: g.leq(a, b)) if direction == "up" else (lambda a, b: g.leq(b, a))
    support = [v for v in order if wl(x, v)]
    insupp = set(support)
    stalk: dict = {v: [] for v in support}  # generator degrees, in creation order
    # rho[(y, e)] = list over stalk generators t of y: vector in M_E at degree shift(t)
    rho_up: dict = {}
    lower_edges = {}
    for y in support:
        lower_edges[y] = [
            e for e in g.incident[y]
            if g.other_end(e, y) in insupp and pos[g.other_end(e, y)] < pos[y]
        ]
    # generators of sections over processed vertices:
    # each is [degree, birth position, {vertex: coordinate vector at that degree}]
    gens: list = []
    image_prev: dict = {}   # y -> basis of boundary image in previous degree
    kernel_prev: dict = {}  # y -> basis of kernel in previous degree
    timings = {v: 0.0 for v in support}
    bound = max(policy.bound(abs(g.lengths[v] - g.lengths[x])) for v in support)
    last_gen = 0
    d = 0
    while True:
        horizon = max(bound, last_gen + policy.saturation_window)
        if d > horizon or d > policy.degree_cap:
            break
        for y in support:
            t0 = time.perf_counter()
            shifts_y = tuple(stalk[y])
            parts = []
            for e in lower_edges[y]:
                z = g.other_end(e, y)
                lab = g.labels[e]
                parts.append((e, z, lab.coefficients, lab.pivot, tuple(stalk[z])))
            space = _EdgeSpace(n, parts, d)
            if y == x:
                if d == 0:
                    stalk[y].append(0)
                    rho_up[y] = [[]]
                    shifts_y = (0,)
                image = []
                candidates = []
            else:
                # S_2 times the previous image
                sub = _mult_edge_rows(n, parts, d, image_prev.get(y, []), space)
                candidates = []
                for gen in gens:
                    if gen[0] != d or gen[1] >= pos[y]:
                        continue
                    candidates.append(_boundary(parts, gen[2], d, space))
                ech = Echelon.from_rows(sub, space.dim) if space.dim else Echelon(0)
                new = []
                for c in candidates:
                    if space.dim and ech.add(c):
                        new.append(c)
                image = [list(r) for r in ech.rows]
                for vec in new:
                    stalk[y].append(d)
                    rho_up.setdefault(y, []).append(vec)
                    last_gen = max(last_gen, d)
                shifts_y = tuple(stalk[y])
            image_prev[y] = image
            # the degree-d map from stalk_y to the boundary edge space
            ncols = graded.free_dim(n, shifts_y, d)
            cols = _stalk_to_edges(n, parts, shifts_y, rho_up.get(y, []), d, space)
            rows = [[cols[c][r] for c in range(ncols)] for r in range(space.dim)]
            # lift generators born earlier to y
            if y != x:
                for gen in gens:
                    if gen[0] != d or gen[1] >= pos[y]:
                        continue
                    target = _boundary(parts, gen[2], d, space)
                    if not any(target):
                        if ncols:
                            gen[2][y] = [ZERO] * ncols
                        continue
                    sol = solve(rows, [target], ncols)[0]
                    if sol is None:
                        raise AssertionError("boundary value outside the image of the new stalk")
                    gen[2][y] = sol
            # kernel generators become new section generators born at y
            ker = kernel_basis(rows, ncols) if ncols else []
            prev = kernel_prev.get(y, [])
            sub = []
            for var in range(n):
                imap = graded.free_mult(n, shifts_y, d, var)
                for r in prev:
                    sub.append(graded.apply_index_map(imap, r, ncols))
            ech = Echelon.from_rows(sub, ncols) if ncols else Echelon(0)
            for k in ker:
                if ech.add(k):
                    gens.append([d, pos[y], {y: list(k)}])
            kernel_prev[y] = ker
            timings[y] += time.perf_counter() - t0
        d += 2
    degrees_computed = d - 2
    saturated = degrees_computed >= last_gen + policy.saturation_window and degrees_computed >= bound
    sheaf = _assemble(g, support, stalk, rho_up, lower_edges)
    result = BMPResult(
        sheaf=sheaf,
        base_vertex=g.names[x],
        direction=direction,
        generator_degrees={g.names[v]: list(stalk[v]) for v in sorted(support)},
        saturated=saturated,
        provisional=not saturated,
        degrees_computed=degrees_computed,
        last_generator_degree=last_gen,
        oracle=None,
        timings={g.names[v]: t for v, t in timings.items()},
    )
    if policy.oracle_crosscheck and g.block is not None:
        result.oracle = oracle_compare(g, result, oracle_table)
    return result


def _boundary(parts, comps, d, space) -> list:
    """Reduction of a section's lower-vertex components into the edge space."""
    out = [ZERO] * space.dim
    for (e, z, coeffs, pivot, shifts), off in zip(parts, space.offsets):
        vec = comps.get(z)
        if vec is None:
            continue
        red = graded.reduction_map(coeffs, shifts, d)
        for i, c in enumerate(vec):
            if c:
                for r, a in red[i]:
                    out[off + r] += c * a
    return out


def _mult_edge_rows(n, parts, d, rows, space) -> list:
    """S_2 times degree d-2 vectors of the edge space."""
    if not rows:
        return []
    out = []
    for var in range(n):
        exp = tuple(1 if i == var else 0 for i in range(n))
        maps = [graded.quotient_mult(coeffs, shifts, d, exp) for _, _, coeffs, _, shifts in parts]
        prev = _EdgeSpace(n, parts, d - 2)
        for r in rows:
            vec = [ZERO] * space.dim
            for m, poff, off in zip(maps, prev.offsets, space.offsets):
                for i, col in enumerate(m):
                    c = r[poff + i]
                    if c:
                        for rr, a in col:
                            vec[off + rr] += c * a
            out.append(vec)
    return out


def _stalk_to_edges(n, parts, shifts_y, rho_y, d, space) -> list:
    """Columns of the degree-d map from the free stalk at y to the edge space."""
    cols = []
    for j, _, k in graded.free_layout(n, shifts_y, d):
        gen_vec = rho_y[j]
        sj = shifts_y[j]
        src = _EdgeSpace(n, parts, sj)
        for mono in _monomials(n, k):
            col = [ZERO] * space.dim
            for (e, z, coeffs, pivot, shifts), soff, off in zip(parts, src.offsets, space.offsets):
                m = graded.quotient_mult(coeffs, shifts, d, mono) if k else None
                dim = graded.quotient_dim(n, pivot, shifts, sj)
                for i in range(dim):
                    c = gen_vec[soff + i]
                    if not c:
                        continue
                    if m is None:
                        col[off + i] += c
                    else:
                        for rr, a in m[i]:
                            col[off + rr] += c * a
            cols.append(col)
    return cols


def _assemble(g, support, stalk, rho_up, lower_edges) -> Sheaf:
    ring = g.ring
    n = ring.n
    stalks = [()] * len(g)
    for v in support:
        stalks[v] = tuple(stalk[v])
    edge_shifts = [()] * len(g.edges)
    restrictions = {}
    one = ring.one()
    zero = ring.zero()
    for y in support:
        rho_y = rho_up.get(y, [])
        parts = []
        for e in lower_edges[y]:
            z = g.other_end(e, y)
            lab = g.labels[e]
            parts.append((e, z, lab.coefficients, lab.pivot, tuple(stalk[z])))
        for k, (e, z, coeffs, pivot, sz) in enumerate(parts):
            edge_shifts[e] = sz
            restrictions[(z, e)] = [[one if i == j else zero for j in range(len(sz))] for i in range(len(sz))]
            m = [[zero] * len(stalk[y]) for _ in sz]
            for t, st in enumerate(stalk[y]):
                off = _EdgeSpace(n, parts, st).offsets[k]
                vec = rho_y[t]
                for i, boff, kk in graded.quotient_layout(n, pivot, sz, st):
                    mons = _reduced_monomials(n, kk, pivot)
                    terms = {mo: vec[off + boff + q] for q, mo in enumerate(mons) if vec[off + boff + q]}
                    m[i][t] = Polynomial(ring, terms)
            restrictions[(y, e)] = m
    return Sheaf(g, stalks, edge_shifts, restrictions)


def oracle_compare(g: MomentGraph, result: BMPResult, table: KLTable | None = None) -> dict:
    """Compare stalk ranks with Kazhdan-Lusztig values at q = 1."""
    group = g.block.group
    if table is None:
        table = kl_table(group)
    reps = g.block.representatives
    w0 = group.longest()
    base = reps[g.index[result.base_vertex]]
    regular = len(g.block.stabilizer) == 1
    mismatches = []
    for v in range(len(g)):
        x = reps[v]
        if result.direction == "down":
            want = table.at_one(x, base)
        else:
            want = table.at_one(w0 * x, w0 * base)
        have = len(result.sheaf.stalk_shifts[v])
        if want != have:
            mismatches.append({"vertex": g.names[v], "rank": have, "kl": want})
    return {"regular": regular, "mismatches": mismatches}


def bmp_family(g: MomentGraph, direction, policy: DegreeBoundPolicy | None = None) -> list:
    """BMP results for every base vertex, cached on the graph."""
    direction = normalize_direction(direction)
    policy = policy or DegreeBoundPolicy()
    cache = g.__dict__.setdefault("_bmp_family", {})
    key = (direction, policy)
    if key not in cache:
        cache[key] = [bmp(g, direction, x, policy) for x in range(len(g))]
    return cache[key]


def _kl_for(g: MomentGraph, table: KLTable, direction: str, w: int, x: int) -> tuple:
    reps = g.block.representatives
    if direction == "down":
        return table.poly(reps[x], reps[w])
    w0 = g.block.group.longest()
    return table.poly(w0 * reps[x], w0 * reps[w])


@dataclass
class MultiplicityTable:
    names: list
    direction: str
    ranks: list      # ranks[w][x]
    graded: list     # graded[w][x] = {q exponent: multiplicity}
    kl: list | None  # kl[w][x] = coefficient tuple, or None without an oracle
    offsets: list    # per base w: q-degree offset between graded ranks and KL, None if inconsistent

    @property
    def ungraded_ok(self) -> bool:
        if self.kl is None:
            return True
        return all(
            self.ranks[w][x] == sum(self.kl[w][x])
            for w in range(len(self.names)) for x in range(len(self.names))
        )

    @property
    def graded_ok(self) -> bool:
        return self.kl is None or all(o is not None for o in self.offsets)

    def entry(self, w, x) -> int:
        return self.ranks[self.names.index(w) if isinstance(w, str) else w][
            self.names.index(x) if isinstance(x, str) else x]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "direction": self.direction,
            "rows": "base w",
            "columns": "vertex x",
            "vertices": list(self.names),
            "ranks": self.ranks,
            "graded": [[{str(k): v for k, v in e.items()} for e in row] for row in self.graded],
            "kl": None if self.kl is None else [[list(p) for p in row] for row in self.kl],
            "graded_offsets": self.offsets,
            "ungraded_ok": self.ungraded_ok,
            "graded_ok": self.graded_ok,
        }

    def to_csv(self) -> str:
        lines = ["w\\x," + ",".join(self.names)]
        for w, row in enumerate(self.ranks):
            lines.append(self.names[w] + "," + ",".join(str(r) for r in row))
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        width = max(len(n) for n in self.names)
        head = " " * (width + 2) + " ".join(f"{n:>{width}}" for n in self.names)
        lines = [f"multiplicities ({self.direction}), rows w, columns x", head]
        for w, row in enumerate(self.ranks):
            lines.append(f"{self.names[w]:<{width}}  " + " ".join(f"{r:>{width}}" for r in row))
        lines.append(f"KL ungraded: {'ok' if self.ungraded_ok else 'MISMATCH'}; "
                     f"graded offsets: {self.offsets}")
        return "\n".join(lines)


def _graded_offset(graded_row: list, kl_row: list):
    """One q-degree offset taking every KL polynomial in a row to the graded rank."""
    offset = None
    for have, poly in zip(graded_row, kl_row):
        want = {k: c for k, c in enumerate(poly) if c}
        if not want and not have:
            continue
        if not want or not have:
            return None
        o = min(have) - min(want)
        if offset is None:
            offset = o
        if o != offset or {k + o: c for k, c in want.items()} != have:
            return None
    return 0 if offset is None else offset


def multiplicity_table(g: MomentGraph, direction, policy: DegreeBoundPolicy | None = None,
                       table: KLTable | None = None) -> MultiplicityTable:
    from .sheaf import stalk_rank_poly

    direction = normalize_direction(direction)
    results = bmp_family(g, direction, policy)
    ranks = [[len(r.sheaf.stalk_shifts[x]) for x in range(len(g))] for r in results]
    graded_ranks = [[stalk_rank_poly(r.sheaf, x) for x in range(len(g))] for r in results]
    kl = None
    offsets = [None] * len(g)
    if g.block is not None:
        table = table or kl_table(g.block.group)
        kl = [[_kl_for(g, table, direction, w, x) for x in range(len(g))] for w in range(len(g))]
        offsets = [_graded_offset(graded_ranks[w], kl[w]) for w in range(len(g))]
    return MultiplicityTable(list(g.names), direction, ranks, graded_ranks, kl, offsets)


@dataclass
class PullbackReport:
    comparisons: list

    @property
    def ok(self) -> bool:
        return all(c["equal"] for c in self.comparisons)

    def to_json(self) -> dict:
        return {"ok": self.ok, "comparisons": self.comparisons}


def verify_w0_pullback(g: MomentGraph, policy: DegreeBoundPolicy | None = None) -> PullbackReport:
    """Compare B_down(x) with B_up(w0 x) read through the relabeling v -> w0 v."""
    from .momentgraph import w0_relabel

    tau = w0_relabel(g)
    down = bmp_family(g, "down", policy)
    up = bmp_family(g, "up", policy)
    comparisons = []
    for x in range(len(g)):
        a = down[x].sheaf
        b = up[tau(x)].sheaf
        bad_stalks = [
            g.names[v] for v in range(len(g))
            if sorted(a.stalk_shifts[v]) != sorted(b.stalk_shifts[tau(v)])
        ]
        bad_edges = []
        for e, (p, q) in enumerate(g.edges):
            f = g.edge_between(tau(p), tau(q))
            if f is None or sorted(a.edge_shifts[e]) != sorted(b.edge_shifts[f]):
                bad_edges.append([g.names[p], g.names[q]])
        comparisons.append({
            "down_base": g.names[x],
            "up_base": g.names[tau(x)],
            "equal": not bad_stalks and not bad_edges,
            "stalk_differences": bad_stalks,
            "edge_differences": bad_edges,
        })
    return PullbackReport(comparisons)
