"""Small handcrafted graphs used as negative controls."""

from __future__ import annotations

from .momentgraph import UP, MomentGraph, handcrafted


def double_label_graph() -> MomentGraph:
    """Two edges at ``a`` with the same label line, so the GKM condition fails."""
    return handcrafted(
        2,
        ["a", "b", "c"],
        [("a", "b", [1, 0]), ("a", "c", [2, 0]), ("b", "c", [0, 1])],
        [("a", "b"), ("a", "c"), ("b", "c")],
        lengths=[0, 1, 2],
    )


def tripod_graph() -> MomentGraph:
    """A top vertex over three incomparable ones, labels pairwise independent in rank 2.

    The structure sheaf is not flabby for the upward direction: over the
    three bottom vertices every triple of constants is a section, but only
    the constant triples extend to the top.
    """
    return handcrafted(
        2,
        ["m1", "m2", "m3", "t"],
        [("m1", "t", [1, 0]), ("m2", "t", [0, 1]), ("m3", "t", [1, 1])],
        [("m1", "t"), ("m2", "t"), ("m3", "t")],
        direction=UP,
        lengths=[0, 0, 0, 1],
    )


FIXTURES = {
    "double-label": double_label_graph,
    "tripod": tripod_graph,
}
