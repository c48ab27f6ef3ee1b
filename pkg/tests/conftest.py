from __future__ import annotations

import pytest

from mgsheaves.coxeter import build_root_system
from mgsheaves.momentgraph import build_block_graph

_GRAPHS: dict = {}


def block(cartan_type: str, rank: int, weight=None):
    """Regular block graphs are shared across the session (BMP results are cached on them)."""
    key = (cartan_type, rank, tuple(weight) if weight else None)
    if key not in _GRAPHS:
        rs = build_root_system(cartan_type, rank)
        _GRAPHS[key] = build_block_graph(rs, list(weight) if weight else [-2] * rank)
    return _GRAPHS[key]


@pytest.fixture
def a1():
    return block("A", 1)


@pytest.fixture
def a2():
    return block("A", 2)


@pytest.fixture
def b2():
    return block("B", 2)


@pytest.fixture
def a3():
    return block("A", 3)
