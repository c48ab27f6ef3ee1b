"""Walk through the A3 block: moment graph, BMP stalks, and the KL comparison.

Run with ``python3 notebooks/kl_multiplicities_a3.py``.
"""

from __future__ import annotations

from mgsheaves.bmp import bmp, multiplicity_table
from mgsheaves.coxeter import build_root_system
from mgsheaves.hecke import format_kl, kl_table
from mgsheaves.momentgraph import DOWN, build_block_graph
from mgsheaves.sheaf import format_rank_poly, stalk_rank_poly

# %% the regular block of -2rho: one vertex per Weyl group element
rs = build_root_system("A", 3)
g = build_block_graph(rs, [-2, -2, -2])
print(len(g), "vertices,", len(g.edges), "edges")

# %% the first stalk of rank bigger than one
r = bmp(g, DOWN, "s2s1s3s2")
print("stalk at e:", format_rank_poly(stalk_rank_poly(r.sheaf, "e")))
print("KL polynomial:", format_kl(kl_table(g.block.group).poly("e", "s2s1s3s2")))

# %% the whole table; only a handful of entries differ from 0/1
t = multiplicity_table(g, DOWN)
big = [(w, x, t.entry(w, x)) for w in g.names for x in g.names if t.entry(w, x) > 1]
print("entries > 1:", big)
print("ranks agree with P(1):", t.ungraded_ok, " graded agree:", t.graded_ok)
