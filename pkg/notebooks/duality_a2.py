"""Global sections, duals and shifts for the A2 block.

Run with ``python3 notebooks/duality_a2.py``.
"""

from __future__ import annotations

from mgsheaves import zlattice as zl
from mgsheaves.bmp import bmp_family
from mgsheaves.coxeter import build_root_system
from mgsheaves.momentgraph import UP, build_block_graph
from mgsheaves.suites import affine_fit

g = build_block_graph(build_root_system("A", 2), [-2, -2])

# %% each BMP sheaf gives a free lattice of global sections
rows = []
for x, r in enumerate(bmp_family(g, UP)):
    m = zl.gamma(r.sheaf)
    d = zl.dualize(m)
    rep = zl.compare_shifted(zl.localize(d), r.sheaf)
    rows.append((g.lengths[x], rep.sigma))
    print(f"{r.base_vertex:>8}  gens {m.generator_degrees()}  dual gens {sorted(d.generator_degrees())}  {rep.verdict}")

# %% the shifts line up on a line in the length
print("affine fit (ok, intercept, slope):", affine_fit(rows))

# %% a Hom comparison for one pair
rep = zl.verify_hom_correspondence(g, "s1", "s1s2s1")
print("left", rep.left_total, "right", rep.right_total, "shift", rep.sigma, "matched", rep.matched)
