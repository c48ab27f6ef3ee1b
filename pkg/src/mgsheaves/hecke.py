"""Kazhdan-Lusztig polynomials by the standard canonical-basis recursion.

This module only depends on the group tables in ``coxeter`` and never looks
at sheaves, so it serves as an independent check on stalk ranks.
Polynomials in q are tuples of integer coefficients, constant term first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coxeter import WeylElement, WeylGroup


def _trim(c: list) -> tuple:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _add_into(acc: list, poly, shift: int = 0, scale: int = 1) -> None:
    need = len(poly) + shift
    if len(acc) < need:
        acc.extend([0] * (need - len(acc)))
    for i, a in enumerate(poly):
        acc[i + shift] += scale * a


def format_kl(poly) -> str:
    if not poly:
        return "0"
    parts = []
    for i, a in enumerate(poly):
        if a == 0:
            continue
        mon = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
        if i == 0:
            parts.append(str(a))
        elif a == 1:
            parts.append(mon)
        else:
            parts.append(f"{a}{mon}")
    return " + ".join(parts)


@dataclass
class KLTable:
    group: WeylGroup
    polys: dict = field(repr=False)
    mu: dict = field(repr=False)

    def _idx(self, x) -> int:
        if isinstance(x, WeylElement):
            return x.index
        if isinstance(x, str):
            return self.group.from_name(x).index
        return x

    def poly(self, x, w) -> tuple:
        return self.polys.get((self._idx(x), self._idx(w)), ())

    def mu_coefficient(self, x, w) -> int:
        return self.mu.get((self._idx(x), self._idx(w)), 0)

    def at_one(self, x, w) -> int:
        return sum(self.poly(x, w))

    def __getitem__(self, key) -> tuple:
        return self.poly(*key)

    def to_json(self) -> dict:
        g = self.group
        return {
            "pairs": [
                {"x": g.element(x).name, "w": g.element(w).name, "coefficients": list(p)}
                for (x, w), p in sorted(self.polys.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            ]
        }


def kl_table(group: WeylGroup) -> KLTable:
    """All P_{x,w} for the group, using right descents.

    Pick the last letter s of the reduced word of w and set v = ws.  With
    c = 1 when xs < x and c = 0 otherwise,

        P_{x,w} = q^{1-c} P_{xs,v} + q^c P_{x,v}
                  - sum_{z < v, zs < z} mu(z, v) q^{(l(w)-l(z))/2} P_{x,z}.
    """
    elems = group.elements
    length = [e.length for e in elems]
    polys: dict = {}
    mu: dict = {}
    for w in range(len(elems)):
        down = group.downset(w)
        if w == 0:
            polys[(0, 0)] = (1,)
            continue
        s = elems[w].reduced_word[-1]
        v = group.right_mult(w, s)
        vdown = group.downset(v)
        corrections = [
            z for z in vdown
            if z != v and length[group.right_mult(z, s)] < length[z] and mu.get((z, v), 0)
        ]
        for x in down:
            xs = group.right_mult(x, s)
            c = 1 if length[xs] < length[x] else 0
            acc: list = []
            p1 = polys.get((xs, v), ())
            _add_into(acc, p1, 1 - c)
            _add_into(acc, polys.get((x, v), ()), c)
            for z in corrections:
                pz = polys.get((x, z))
                if pz:
                    _add_into(acc, pz, (length[w] - length[z]) // 2, -mu[(z, v)])
            p = _trim(acc)
            polys[(x, w)] = p
            gap = length[w] - length[x]
            if gap % 2 == 1:
                top = (gap - 1) // 2
                if len(p) > top and p[top]:
                    mu[(x, w)] = p[top]
    return KLTable(group, polys, mu)


def kl_eval_at_one(table: KLTable, x, w) -> int:
    return table.at_one(x, w)
