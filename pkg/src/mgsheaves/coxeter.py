"""Root systems, Weyl groups, Bruhat order and the rho-shifted dot action.

Weights are written in the fundamental-weight basis, so the pairing of a
weight with a simple coroot is a coordinate read-off.  Roots are stored in
simple-root coordinates and coroots in simple-coroot coordinates; the latter
are also the variables of the polynomial ring used for edge labels.

Reflection subgroups (integral Weyl groups of non-integral weights) are
handled by the same ``WeylGroup`` class, generated by the reflections in the
simple system of the integral positive roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from gmpy2 import mpq

from .polyalg import Q, format_q

DEFAULT_GROUP_CAP = 1152

SUPPORTED = {
    "A": range(1, 5),
    "B": range(2, 5),
    "C": range(2, 5),
    "D": range(3, 5),
    "G": range(2, 3),
}

CLASSICAL_POSITIVE_ROOTS = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "G": lambda n: 6,
}


class UnsupportedRootSystem(ValueError):
    pass


class GroupTooLarge(ValueError):
    pass


class NotAntidominant(ValueError):
    pass


def _euclidean_simple_roots(cartan_type: str, rank: int):
    def e(i, dim):
        return [Fraction(1) if j == i else Fraction(0) for j in range(dim)]

    def sub(a, b):
        return [x - y for x, y in zip(a, b)]

    if cartan_type == "A":
        dim = rank + 1
        return [sub(e(i, dim), e(i + 1, dim)) for i in range(rank)]
    if cartan_type in "BCD":
        dim = rank
        roots = [sub(e(i, dim), e(i + 1, dim)) for i in range(rank - 1)]
        if cartan_type == "B":
            roots.append(e(rank - 1, dim))
        elif cartan_type == "C":
            roots.append([2 * x for x in e(rank - 1, dim)])
        else:
            roots.append([x + y for x, y in zip(e(rank - 2, dim), e(rank - 1, dim))])
        return roots
    if cartan_type == "G":
        return [[Fraction(1), Fraction(-1), Fraction(0)], [Fraction(-2), Fraction(1), Fraction(1)]]
    raise UnsupportedRootSystem(cartan_type)


@dataclass(frozen=True)
class Weight:
    """A weight in fundamental-weight coordinates (exact rationals)."""

    coords: tuple

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(Q(c) for c in coords))

    def __add__(self, other):
        return Weight(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        return Weight(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return Weight(-a for a in self.coords)

    def __mul__(self, c):
        c = Q(c)
        return Weight(c * a for a in self.coords)

    __rmul__ = __mul__

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def pair(self, coroot) -> mpq:
        """Pairing with a coroot given in simple-coroot coordinates."""
        return sum((Q(b) * a for a, b in zip(self.coords, coroot)), mpq(0))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __repr__(self):
        return "Weight(" + ", ".join(format_q(c) for c in self.coords) + ")"

    def to_json(self):
        return [format_q(c) for c in self.coords]


@dataclass(frozen=True)
class RootSystemData:
    cartan_type: str
    rank: int
    cartan_matrix: tuple
    positive_roots: tuple
    positive_coroots: tuple
    rho: Weight
    inverse_cartan: tuple = field(repr=False, compare=False)

    @property
    def name(self) -> str:
        return f"{self.cartan_type}{self.rank}"

    @property
    def simple_roots(self) -> tuple:
        """Simple roots in weight coordinates (columns of the Cartan matrix)."""
        n = self.rank
        return tuple(Weight(self.cartan_matrix[i][j] for i in range(n)) for j in range(n))

    @property
    def simple_coroots(self) -> tuple:
        n = self.rank
        return tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n))

    def root_weight(self, root) -> Weight:
        """Weight coordinates of a root given in simple-root coordinates."""
        n = self.rank
        return Weight(sum(self.cartan_matrix[i][k] * root[k] for k in range(n)) for i in range(n))

    def weight_to_root_coords(self, weight) -> tuple:
        n = self.rank
        w = weight.coords if isinstance(weight, Weight) else tuple(Q(c) for c in weight)
        return tuple(sum((self.inverse_cartan[i][k] * w[k] for k in range(n)), mpq(0)) for i in range(n))

    def all_roots(self) -> tuple:
        return self.positive_roots + tuple(tuple(-a for a in r) for r in self.positive_roots)

    def coroot_of(self, root) -> tuple:
        root = tuple(root)
        if root in self.positive_roots:
            return self.positive_coroots[self.positive_roots.index(root)]
        neg = tuple(-a for a in root)
        c = self.positive_coroots[self.positive_roots.index(neg)]
        return tuple(-a for a in c)


def _invert(matrix) -> tuple:
    n = len(matrix)
    m = [[mpq(x) for x in row] + [mpq(1 if i == j else 0) for j in range(n)] for i, row in enumerate(matrix)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c])
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def build_root_system(cartan_type: str, rank: int) -> RootSystemData:
    cartan_type = cartan_type.upper()
    if cartan_type == "G2":
        cartan_type = "G"
    if cartan_type not in SUPPORTED or rank not in SUPPORTED[cartan_type]:
        raise UnsupportedRootSystem(f"unsupported root system {cartan_type}{rank}")
    simple = _euclidean_simple_roots(cartan_type, rank)

    def ip(a, b):
        return sum(x * y for x, y in zip(a, b))

    cartan = tuple(
        tuple(int(2 * ip(simple[i], simple[j]) / ip(simple[i], simple[i])) for j in range(rank))
        for i in range(rank)
    )

    # closure of simple (root, coroot) pairs under the simple reflections
    def reflect_root(a, j):
        k = sum(a[m] * cartan[j][m] for m in range(rank))
        return tuple(a[m] - (k if m == j else 0) for m in range(rank))

    def reflect_coroot(b, j):
        k = sum(b[m] * cartan[m][j] for m in range(rank))
        return tuple(b[m] - (k if m == j else 0) for m in range(rank))

    start = [
        (tuple(1 if m == i else 0 for m in range(rank)),) * 2 for i in range(rank)
    ]
    seen = dict(start)
    frontier = list(start)
    while frontier:
        nxt = []
        for a, b in frontier:
            for j in range(rank):
                a2, b2 = reflect_root(a, j), reflect_coroot(b, j)
                if a2 not in seen:
                    seen[a2] = b2
                    nxt.append((a2, b2))
        frontier = nxt
    positive = sorted(
        (a for a in seen if all(x >= 0 for x in a)),
        key=lambda a: (sum(a), tuple(-x for x in a)),
    )
    coroots = tuple(seen[a] for a in positive)
    positive = tuple(positive)
    if len(positive) != CLASSICAL_POSITIVE_ROOTS[cartan_type](rank):
        raise AssertionError("root closure produced the wrong number of roots")
    half = [Fraction(0)] * rank
    for a in positive:
        for m in range(rank):
            half[m] += Fraction(a[m], 2)
    rs = RootSystemData(
        cartan_type=cartan_type,
        rank=rank,
        cartan_matrix=cartan,
        positive_roots=positive,
        positive_coroots=coroots,
        rho=Weight([0] * rank),
        inverse_cartan=_invert(cartan),
    )
    rho = rs.root_weight([Q(h) for h in half])
    object.__setattr__(rs, "rho", rho)
    return rs


def _matmul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _apply(m, v):
    return tuple(sum((m[i][k] * v[k] for k in range(len(v))), mpq(0)) for i in range(len(m)))


@dataclass(frozen=True, eq=False)
class WeylElement:
    action_matrix: tuple
    reduced_word: tuple
    length: int
    index: int = -1
    group: "WeylGroup" = field(default=None, repr=False, compare=False)

    @property
    def name(self) -> str:
        if self.group is None:
            return "e" if not self.reduced_word else "".join(f"s{i + 1}" for i in self.reduced_word)
        return self.group.word_name(self.reduced_word)

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.action_matrix == other.action_matrix

    def __hash__(self):
        return hash(self.action_matrix)

    def __repr__(self):
        return f"WeylElement({self.name})"

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return self.group.element(self.group.multiply(self.index, other.index))

    def inverse(self) -> "WeylElement":
        return self.group.element(self.group.inverse(self.index))


class WeylGroup:
    """Finite reflection group on weight coordinates.

    ``generators`` lists (root, coroot) pairs whose reflections are the simple
    reflections of the Coxeter system; for the full Weyl group these are the
    simple roots of ``rs``.
    """

    def __init__(self, rs: RootSystemData, generators=None, positive_roots=None, cap: int = DEFAULT_GROUP_CAP):
        self.rs = rs
        n = rs.rank
        if generators is None:
            generators = [(r, c) for r, c in zip(rs.positive_roots, rs.positive_coroots) if sum(r) == 1]
            generators.sort(key=lambda rc: rc[0].index(1))
        self.generator_roots = tuple(tuple(r) for r, _ in generators)
        self.generator_coroots = tuple(tuple(c) for _, c in generators)
        if positive_roots is None:
            positive_roots = rs.positive_roots
        self.positive_roots = tuple(positive_roots)
        self.cap = cap
        self._root_lookup = {tuple(rs.root_weight(r).coords): (i, 1) for i, r in enumerate(self.positive_roots)}
        self._root_lookup.update({
            tuple((-rs.root_weight(r)).coords): (i, -1) for i, r in enumerate(self.positive_roots)
        })
        self.generator_matrices = tuple(self._reflection_matrix(r, c) for r, c in generators)
        ident = tuple(tuple(mpq(1 if i == j else 0) for j in range(n)) for i in range(n))
        self._generate(ident)

    def _reflection_matrix(self, root, coroot):
        n = self.rs.rank
        rw = self.rs.root_weight(root).coords
        return tuple(
            tuple(mpq(1 if i == k else 0) - rw[i] * coroot[k] for k in range(n)) for i in range(n)
        )

    def _generate(self, ident):
        words = {ident: ()}
        level = [ident]
        order = [ident]
        while level:
            best = {}
            for m in level:
                w = words[m]
                for k, g in enumerate(self.generator_matrices):
                    m2 = _matmul(m, g)
                    if m2 in words:
                        continue
                    cand = w + (k,)
                    if m2 not in best or cand < best[m2]:
                        best[m2] = cand
            level = sorted(best, key=lambda m: best[m])
            for m in level:
                words[m] = best[m]
            order.extend(level)
            if len(order) > self.cap:
                raise GroupTooLarge(f"Weyl group exceeds the configured cap of {self.cap} elements")
        self.elements = tuple(
            WeylElement(m, words[m], len(words[m]), i, self) for i, m in enumerate(order)
        )
        self._index = {m: i for i, m in enumerate(order)}
        self._right = [
            [self._index[_matmul(e.action_matrix, g)] for e in self.elements] for g in self.generator_matrices
        ]
        self._left = [
            [self._index[_matmul(g, e.action_matrix)] for e in self.elements] for g in self.generator_matrices
        ]
        self._downsets = [None] * len(order)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def rank(self) -> int:
        return len(self.generator_matrices)

    def element(self, i: int) -> WeylElement:
        return self.elements[i]

    @property
    def identity(self) -> WeylElement:
        return self.elements[0]

    def index_of(self, matrix) -> int:
        return self._index[matrix]

    def word_name(self, word) -> str:
        if not word:
            return "e"
        return "".join(self.generator_name(k) for k in word)

    def generator_name(self, k: int) -> str:
        root = self.generator_roots[k]
        if sum(root) == 1:
            return f"s{root.index(1) + 1}"
        return "s[" + ",".join(str(a) for a in root) + "]"

    def from_word(self, word) -> WeylElement:
        i = 0
        for k in word:
            i = self._right[k][i]
        return self.elements[i]

    def from_name(self, name: str) -> WeylElement:
        for e in self.elements:
            if e.name == name:
                return e
        # accept any (possibly non-lexmin) word over the generator names
        names = [self.generator_name(k) for k in range(self.rank)]
        word = []
        rest = name
        while rest:
            for k, g in enumerate(names):
                if rest.startswith(g):
                    word.append(k)
                    rest = rest[len(g):]
                    break
            else:
                raise KeyError(f"cannot parse Weyl group element {name!r}")
        return self.from_word(word)

    def multiply(self, i: int, j: int) -> int:
        for k in self.elements[j].reduced_word:
            i = self._right[k][i]
        return i

    def inverse(self, i: int) -> int:
        j = 0
        for k in reversed(self.elements[i].reduced_word):
            j = self._right[k][j]
        return j

    def right_mult(self, i: int, k: int) -> int:
        return self._right[k][i]

    def left_mult(self, k: int, i: int) -> int:
        return self._left[k][i]

    def inversion_count(self, i: int) -> int:
        """Number of positive roots of the system sent to negative roots."""
        m = self.elements[i].action_matrix
        count = 0
        for r in self.positive_roots:
            img = _apply(m, self.rs.root_weight(r).coords)
            if self._root_lookup[img][1] < 0:
                count += 1
        return count

    def apply_to_root(self, i: int, root) -> tuple:
        img = _apply(self.elements[i].action_matrix, self.rs.root_weight(root).coords)
        k, sign = self._root_lookup[img]
        return tuple(sign * a for a in self.positive_roots[k])

    def downset(self, i: int) -> frozenset:
        """Indices of all x with x <= element i in Bruhat order."""
        cached = self._downsets[i]
        if cached is not None:
            return cached
        word = self.elements[i].reduced_word
        if not word:
            result = frozenset([0])
        else:
            k = word[-1]
            prev = self._right[k][i]
            below = self.downset(prev)
            result = below | frozenset(self._right[k][x] for x in below)
        self._downsets[i] = result
        return result

    def bruhat_leq(self, x, y) -> bool:
        xi = x.index if isinstance(x, WeylElement) else x
        yi = y.index if isinstance(y, WeylElement) else y
        return xi in self.downset(yi)

    def longest(self) -> WeylElement:
        return longest_element(self.elements)

    def right_descents(self, i: int) -> list:
        return [k for k in range(self.rank) if self._right[k][i] != i and self.elements[self._right[k][i]].length < self.elements[i].length]

    def left_descents(self, i: int) -> list:
        return [k for k in range(self.rank) if self.elements[self._left[k][i]].length < self.elements[i].length]


_GROUP_CACHE: dict = {}


def generate_weyl(rs: RootSystemData, cap: int = DEFAULT_GROUP_CAP) -> list:
    """All elements of the Weyl group of ``rs``, identity first."""
    return list(weyl_group(rs, cap=cap).elements)


def weyl_group(rs: RootSystemData, lam: Weight | None = None, cap: int = DEFAULT_GROUP_CAP) -> WeylGroup:
    """The Weyl group, or the integral Weyl group of ``lam`` when given."""
    if lam is None:
        key = (rs.name, None, cap)
    else:
        key = (rs.name, tuple(integral_subsystem(rs, lam).positive), cap)
    if key in _GROUP_CACHE:
        return _GROUP_CACHE[key]
    if lam is None:
        group = WeylGroup(rs, cap=cap)
    else:
        sub = integral_subsystem(rs, lam)
        gens = [(rs.positive_roots[i], rs.positive_coroots[i]) for i in sub.simple]
        group = WeylGroup(rs, gens, [rs.positive_roots[i] for i in sub.positive], cap=cap)
    _GROUP_CACHE[key] = group
    return group


def bruhat_leq(x: WeylElement, y: WeylElement) -> bool:
    if x.group is not y.group:
        raise ValueError("elements from different groups")
    return x.group.bruhat_leq(x, y)


def subword_leq(x: WeylElement, y: WeylElement) -> bool:
    """Bruhat order by brute-force subword enumeration (slow; reference check)."""
    g = y.group
    word = y.reduced_word
    for pos in combinations(range(len(word)), x.length):
        if g.from_word([word[p] for p in pos]) == x:
            return True
    return False


def dot_action(w: WeylElement, lam: Weight) -> Weight:
    rho = w.group.rs.rho if w.group is not None else Weight([1] * len(lam))
    shifted = lam + rho
    return Weight(_apply(w.action_matrix, shifted.coords)) - rho


@dataclass(frozen=True)
class IntegralSystem:
    roots: tuple
    positive: tuple
    simple: tuple


def integral_subsystem(rs: RootSystemData, lam: Weight) -> IntegralSystem:
    """Roots whose coroot pairs integrally with ``lam``, with their simple system.

    ``positive`` and ``simple`` are indices into ``rs.positive_roots``.
    """
    lam = lam if isinstance(lam, Weight) else Weight(lam)
    pos = tuple(
        i for i, c in enumerate(rs.positive_coroots) if lam.pair(c).denominator == 1
    )
    roots = tuple(rs.positive_roots[i] for i in pos) + tuple(
        tuple(-a for a in rs.positive_roots[i]) for i in pos
    )
    simple = []
    for i in pos:
        # simple iff its reflection makes no other integral positive root negative
        beta = rs.positive_roots[i]
        bw = rs.root_weight(beta)
        cor = rs.positive_coroots[i]
        ok = True
        for j in pos:
            if j == i:
                continue
            gw = rs.root_weight(rs.positive_roots[j])
            img = gw - bw * gw.pair(cor)
            coords = rs.weight_to_root_coords(img)
            if any(c < 0 for c in coords):
                ok = False
                break
        if ok:
            simple.append(i)
    return IntegralSystem(roots=roots, positive=pos, simple=tuple(simple))


def weight_leq(rs: RootSystemData, mu: Weight, nu: Weight) -> bool:
    """``mu <= nu`` iff ``nu - mu`` is a nonnegative integer sum of simple roots."""
    diff = rs.weight_to_root_coords(nu - mu)
    return all(c.denominator == 1 and c >= 0 for c in diff)


def is_antidominant(rs: RootSystemData, lam: Weight) -> bool:
    lam = lam if isinstance(lam, Weight) else Weight(lam)
    shifted = lam + rs.rho
    sub = integral_subsystem(rs, lam)
    return all(shifted.pair(rs.positive_coroots[i]) <= 0 for i in sub.positive)


def longest_element(elements) -> WeylElement:
    elements = list(elements)
    top = max(e.length for e in elements)
    cands = [e for e in elements if e.length == top]
    if len(cands) != 1:
        raise ValueError("no unique longest element")
    return cands[0]


@dataclass(frozen=True)
class Orbit:
    representatives: tuple
    weights: tuple
    stabilizer: tuple
    group: WeylGroup = field(repr=False, compare=False)

    def __len__(self):
        return len(self.representatives)

    def __iter__(self):
        return iter(zip(self.representatives, self.weights))


def orbit_and_stabilizer(rs: RootSystemData, lam: Weight, group: WeylGroup | None = None) -> Orbit:
    """Dot-orbit of an antidominant weight under its integral Weyl group.

    Representatives are the minimal-length elements of the cosets of the
    stabilizer (ties broken by the lexicographically smallest reduced word).
    """
    lam = lam if isinstance(lam, Weight) else Weight(lam)
    if not is_antidominant(rs, lam):
        raise NotAntidominant(
            f"weight {lam} is not antidominant for its integral Weyl group; "
            "pass the antidominant representative of its dot-orbit instead"
        )
    if group is None:
        group = weyl_group(rs, lam)
    by_weight = {}
    stab = []
    for e in group.elements:
        mu = dot_action(e, lam)
        if mu == lam:
            stab.append(e)
        key = mu.coords
        best = by_weight.get(key)
        if best is None or (e.length, e.reduced_word) < (best.length, best.reduced_word):
            by_weight[key] = e
    reps = sorted(by_weight.values(), key=lambda e: (e.length, e.reduced_word))
    weights = tuple(dot_action(e, lam) for e in reps)
    if len(reps) * len(stab) != len(group):
        raise AssertionError("orbit-stabilizer count mismatch")
    return Orbit(tuple(reps), weights, tuple(stab), group)
