"""Ordered moment graphs of blocks, GKM checks and open subgraphs.

Vertices are integers ``0..n-1`` with names; edges are sorted index pairs
with a coroot label normalized to a primitive integer vector.  The partial
order is stored as, for every vertex, the set of vertices below it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .coxeter import (
    RootSystemData,
    Weight,
    WeylGroup,
    bruhat_leq,
    dot_action,
    orbit_and_stabilizer,
    weight_leq,
)
from .polyalg import LinearForm, PolyRing

UP = "up"
DOWN = "down"
SCHEMA_VERSION = 1
EXHAUSTIVE_OPEN_LIMIT = 10
DEFAULT_OPEN_BUDGET = 64


class DoubleEdge(ValueError):
    pass


def normalize_direction(direction: str) -> str:
    d = str(direction).lower()
    if d in ("up", "↑"):
        return UP
    if d in ("down", "↓"):
        return DOWN
    raise ValueError(f"unknown direction {direction!r}")


def flip(direction: str) -> str:
    return DOWN if normalize_direction(direction) == UP else UP


def _transitive_closure(n: int, pairs) -> list:
    below = [{i} for i in range(n)]
    for a, b in pairs:
        below[b].add(a)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            new = set()
            for j in below[i]:
                new |= below[j]
            if not new <= below[i]:
                below[i] |= new
                changed = True
    return below


@dataclass(frozen=True)
class BlockInfo:
    root_system: RootSystemData
    weight: Weight
    group: WeylGroup
    representatives: tuple
    stabilizer: tuple


class MomentGraph:
    """A finite ordered moment graph.

    ``below[i]`` is the set of vertices ``j`` with ``j <= i`` (reflexive).
    ``direction`` is a tag; ``reverse_order`` flips it along with the order.
    """

    def __init__(self, ring: PolyRing, names, edges, labels, below, direction=UP,
                 weights=None, lengths=None, block: BlockInfo | None = None):
        self.ring = ring
        self.names = tuple(names)
        n = len(self.names)
        if len(set(self.names)) != n:
            raise ValueError("duplicate vertex names")
        self.index = {name: i for i, name in enumerate(self.names)}
        self.edges = tuple(edges)
        self.labels = tuple(labels)
        self.below = tuple(frozenset(b) for b in below)
        self.above = tuple(frozenset(j for j in range(n) if i in self.below[j]) for i in range(n))
        self.direction = normalize_direction(direction)
        self.weights = tuple(weights) if weights is not None else None
        self.block = block
        if lengths is None:
            lengths = self._heights()
        self.lengths = tuple(lengths)
        seen = set()
        inc = [[] for _ in range(n)]
        for k, (a, b) in enumerate(self.edges):
            if a == b:
                raise ValueError("loop edge")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise DoubleEdge(f"double edge between {self.names[a]} and {self.names[b]}")
            seen.add(key)
            if not self.leq(a, b) and not self.leq(b, a):
                raise ValueError(f"edge endpoints {self.names[a]}, {self.names[b]} are incomparable")
            inc[a].append(k)
            inc[b].append(k)
        self.incident = tuple(tuple(x) for x in inc)
        self._edge_index = {(min(a, b), max(a, b)): k for k, (a, b) in enumerate(self.edges)}
        self._check_partial_order()

    def _heights(self) -> list:
        n = len(self.names)
        h = [0] * n
        for i in sorted(range(n), key=lambda i: len(self.below[i])):
            h[i] = max((h[j] + 1 for j in self.below[i] if j != i), default=0)
        return h

    def _check_partial_order(self):
        for i, b in enumerate(self.below):
            if i not in b:
                raise ValueError("order not reflexive")
            for j in b:
                if j != i and i in self.below[j]:
                    raise ValueError("order not antisymmetric")
                if not self.below[j] <= b:
                    raise ValueError("order not transitive")

    def __len__(self):
        return len(self.names)

    @property
    def vertex_count(self) -> int:
        return len(self.names)

    def __repr__(self):
        return f"MomentGraph({len(self.names)} vertices, {len(self.edges)} edges, {self.direction})"

    def vertex(self, v) -> int:
        return self.index[v] if isinstance(v, str) else int(v)

    def leq(self, a, b) -> bool:
        return self.vertex(a) in self.below[self.vertex(b)]

    def working_leq(self, a, b, direction) -> bool:
        """The order used for ``direction``: ``<=`` for up, reversed for down."""
        return self.leq(a, b) if normalize_direction(direction) == UP else self.leq(b, a)

    def linear_extension(self, direction=UP, reverse_ties: bool = False) -> list:
        """Vertices sorted compatibly with the working order of ``direction``."""
        up = normalize_direction(direction) == UP
        count = (lambda i: len(self.below[i])) if up else (lambda i: len(self.above[i]))
        key = (lambda i: (count(i), -i)) if reverse_ties else (lambda i: (count(i), i))
        return sorted(range(len(self.names)), key=key)

    def edge_between(self, a, b):
        a, b = self.vertex(a), self.vertex(b)
        return self._edge_index.get((min(a, b), max(a, b)))

    def other_end(self, edge: int, v: int) -> int:
        a, b = self.edges[edge]
        return b if a == v else a

    def cover_relations(self) -> list:
        out = []
        for i in range(len(self.names)):
            for j in sorted(self.below[i]):
                if j == i:
                    continue
                if not any(k != i and k != j and j in self.below[k] for k in self.below[i]):
                    out.append((j, i))
        return sorted(out)

    # ----- serialization -------------------------------------------------

    def to_json(self) -> dict:
        doc = {"schema_version": SCHEMA_VERSION}
        if self.block is not None:
            rs = self.block.root_system
            doc["type"] = rs.cartan_type
            doc["rank"] = rs.rank
            doc["lambda"] = self.block.weight.to_json()
        doc["direction"] = self.direction
        doc["variables"] = list(self.ring.variable_names)
        doc["vertices"] = [
            {
                "id": name,
                "length": self.lengths[i],
                **({"weight": self.weights[i].to_json()} if self.weights is not None else {}),
            }
            for i, name in enumerate(self.names)
        ]
        doc["edges"] = [
            {"source": self.names[a], "target": self.names[b], "label": list(self.labels[k].integer_vector())}
            for k, (a, b) in enumerate(self.edges)
        ]
        doc["order_covers"] = [[self.names[a], self.names[b]] for a, b in self.cover_relations()]
        return doc

    def to_dot(self) -> str:
        lines = ["graph moment {"]
        for i, name in enumerate(self.names):
            lines.append(f'  "{name}" [label="{name}"];')
        for k, (a, b) in enumerate(self.edges):
            lab = ",".join(str(c) for c in self.labels[k].integer_vector())
            lines.append(f'  "{self.names[a]}" -- "{self.names[b]}" [label="({lab})"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc: dict) -> "MomentGraph":
        if "type" in doc:
            from .coxeter import build_root_system

            g = build_block_graph(build_root_system(doc["type"], doc["rank"]), Weight(doc["lambda"]))
            return g if doc["direction"] == g.direction else reverse_order(g)
        names = [v["id"] for v in doc["vertices"]]
        edges = [(e["source"], e["target"], e["label"]) for e in doc["edges"]]
        return handcrafted(
            len(doc["variables"]), names, edges, [tuple(p) for p in doc["order_covers"]],
            direction=doc["direction"], lengths=[v["length"] for v in doc["vertices"]],
        )


def handcrafted(variable_count: int, names, edges, order_pairs, direction=UP, lengths=None) -> MomentGraph:
    """Build a graph from explicit data.

    ``edges`` are ``(a, b, label)`` with vertex names and a coefficient list;
    ``order_pairs`` are ``(a, b)`` meaning ``a <= b`` (closed transitively).
    """
    ring = PolyRing(variable_count)
    index = {name: i for i, name in enumerate(names)}
    pairs = [(index[a], index[b]) for a, b in order_pairs]
    below = _transitive_closure(len(names), pairs)
    es, labels = [], []
    for a, b, lab in edges:
        i, j = index[a], index[b]
        es.append((min(i, j), max(i, j)))
        labels.append(LinearForm(lab).normalized())
    order = sorted(range(len(es)), key=lambda k: es[k])
    return MomentGraph(ring, names, [es[k] for k in order], [labels[k] for k in order], below,
                       direction, lengths=lengths)


def build_block_graph(rs: RootSystemData, lam: Weight) -> MomentGraph:
    """Moment graph of the block of the antidominant weight ``lam``."""
    lam = lam if isinstance(lam, Weight) else Weight(lam)
    orbit = orbit_and_stabilizer(rs, lam)
    group = orbit.group
    reps = orbit.representatives
    weights = orbit.weights
    n = len(reps)
    roots = [(rs.positive_roots[i_], rs.positive_coroots[i_]) for i_ in _integral_positive(group)]
    edges, labels = [], []
    for i, j in combinations(range(n), 2):
        linking = []
        for root, coroot in roots:
            k = (weights[i] + rs.rho).pair(coroot)
            if weights[i] - rs.root_weight(root) * k == weights[j]:
                linking.append((root, coroot))
        if len(linking) > 1:
            raise DoubleEdge(
                f"vertices {reps[i].name} and {reps[j].name} are linked by roots "
                + ", ".join(str(r) for r, _ in linking)
            )
        if linking:
            edges.append((i, j))
            labels.append(LinearForm(linking[0][1]).normalized())
    below = [{j for j in range(n) if weight_leq(rs, weights[j], weights[i])} for i in range(n)]
    ring = PolyRing(rs.rank)
    info = BlockInfo(rs, lam, group, reps, orbit.stabilizer)
    return MomentGraph(ring, [r.name for r in reps], edges, labels, below, UP,
                       weights=weights, lengths=[r.length for r in reps], block=info)


def _integral_positive(group: WeylGroup) -> list:
    rs = group.rs
    return [rs.positive_roots.index(r) for r in group.positive_roots]


@dataclass(frozen=True)
class GKMReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "witness": list(self.witness) if self.witness else None}


def gkm_check(g: MomentGraph) -> GKMReport:
    """No two distinct edges at a common vertex carry proportional labels."""
    for v in range(len(g)):
        inc = g.incident[v]
        for a, b in combinations(inc, 2):
            if g.labels[a].proportional(g.labels[b]):
                ea = tuple(g.names[t] for t in g.edges[a])
                eb = tuple(g.names[t] for t in g.edges[b])
                return GKMReport(False, (g.names[v], ea, eb, list(g.labels[a].integer_vector())))
    return GKMReport(True)


class SubgraphSelector:
    """A vertex subset together with all induced edges."""

    __slots__ = ("graph", "vertices")

    def __init__(self, graph: MomentGraph, vertices):
        self.graph = graph
        self.vertices = frozenset(graph.vertex(v) for v in vertices)

    @property
    def edges(self) -> tuple:
        vs = self.vertices
        return tuple(k for k, (a, b) in enumerate(self.graph.edges) if a in vs and b in vs)

    def complement(self) -> "SubgraphSelector":
        return SubgraphSelector(self.graph, set(range(len(self.graph))) - self.vertices)

    def names(self) -> list:
        return [self.graph.names[i] for i in sorted(self.vertices)]

    def __contains__(self, v):
        return self.graph.vertex(v) in self.vertices

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, SubgraphSelector) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "SubgraphSelector({" + ", ".join(self.names()) + "})"


def full(g: MomentGraph) -> SubgraphSelector:
    return SubgraphSelector(g, range(len(g)))


def is_open(g: MomentGraph, sel, direction) -> bool:
    vs = sel.vertices if isinstance(sel, SubgraphSelector) else frozenset(g.vertex(v) for v in sel)
    rel = g.below if normalize_direction(direction) == UP else g.above
    return all(rel[v] <= vs for v in vs)


def open_subgraphs(g: MomentGraph, direction, budget: int = DEFAULT_OPEN_BUDGET) -> list:
    """Open vertex subsets for ``direction`` in a deterministic order.

    With at most ``EXHAUSTIVE_OPEN_LIMIT`` vertices every open set is listed.
    Otherwise a generating family is used: the empty set, principal closed
    sets below each vertex, complements of principal sets above each vertex,
    the full set, and pairwise unions of principal sets until ``budget`` is hit.
    """
    n = len(g)
    up = normalize_direction(direction) == UP
    rel = g.below if up else g.above
    if n <= EXHAUSTIVE_OPEN_LIMIT:
        found = []
        for mask in range(1 << n):
            vs = frozenset(i for i in range(n) if mask >> i & 1)
            if all(rel[v] <= vs for v in vs):
                found.append(vs)
        found.sort(key=lambda s: (len(s), sorted(s)))
        return [SubgraphSelector(g, s) for s in found]
    other = g.above if up else g.below
    everything = frozenset(range(n))
    family = [frozenset()]
    principal = [frozenset(rel[v]) for v in range(n)]
    family += principal
    family += [everything - other[v] for v in range(n)]
    family.append(everything)
    seen = set()
    out = []
    for s in family:
        if s not in seen:
            seen.add(s)
            out.append(s)
    extra = 0
    for a, b in combinations(range(n), 2):
        if extra >= budget:
            break
        s = principal[a] | principal[b]
        if s not in seen:
            seen.add(s)
            out.append(s)
            extra += 1
    out.sort(key=lambda s: (len(s), sorted(s)))
    return [SubgraphSelector(g, s) for s in out]


def reverse_order(g: MomentGraph) -> MomentGraph:
    """Same vertices, edges and labels with the order reversed.

    The result is cached on both graphs, so reversing twice returns ``g``.
    """
    cached = getattr(g, "_reversed", None)
    if cached is not None:
        return cached
    r = MomentGraph(g.ring, g.names, g.edges, g.labels, g.above, flip(g.direction),
                    weights=g.weights, lengths=g.lengths, block=g.block)
    g._reversed = r
    r._reversed = g
    return r


@dataclass(frozen=True)
class VertexMap:
    """The bijection ``x -> w0 x`` on cosets, with the linear action on labels."""

    graph: MomentGraph
    image: tuple
    coroot_matrix: tuple

    def __call__(self, v) -> int:
        return self.image[self.graph.vertex(v)]

    def name(self, v) -> str:
        return self.graph.names[self(v)]

    def map_label(self, label: LinearForm) -> LinearForm:
        m = self.coroot_matrix
        c = label.coefficients
        return LinearForm([sum(m[i][k] * c[k] for k in range(len(c))) for i in range(len(c))]).normalized()


def w0_relabel(g: MomentGraph) -> VertexMap:
    if g.block is None:
        raise ValueError("w0 relabeling needs a block graph")
    group = g.block.group
    rs = g.block.root_system
    w0 = group.longest()
    lam = g.block.weight
    lookup = {w.coords: i for i, w in enumerate(g.weights)}
    image = []
    for rep in g.block.representatives:
        mu = dot_action(w0 * rep, lam)
        image.append(lookup[mu.coords])
    # coroots transform by the inverse transpose of the weight action
    inv = w0.inverse().action_matrix
    n = rs.rank
    cm = tuple(tuple(inv[k][i] for k in range(n)) for i in range(n))
    return VertexMap(g, tuple(image), cm)


@dataclass(frozen=True)
class OrderDiagnostics:
    adjacent_disagreements: tuple
    global_disagreements: tuple


def order_diagnostics(g: MomentGraph) -> OrderDiagnostics:
    """Compare weight order with Bruhat order on the coset representatives."""
    if g.block is None:
        return OrderDiagnostics((), ())
    reps = g.block.representatives
    adj = []
    for a, b in g.edges:
        for x, y in ((a, b), (b, a)):
            if g.leq(x, y) != bruhat_leq(reps[x], reps[y]):
                adj.append((g.names[x], g.names[y]))
    glob = []
    for x in range(len(g)):
        for y in range(len(g)):
            if g.leq(x, y) != bruhat_leq(reps[x], reps[y]):
                glob.append((g.names[x], g.names[y]))
    return OrderDiagnostics(tuple(adj), tuple(glob))
