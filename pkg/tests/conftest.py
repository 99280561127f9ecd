from __future__ import annotations

import functools

import pytest

from dcomplex import tilings
from dcomplex.labeling import Realization, labeling_from_realization


@functools.lru_cache(maxsize=None)
def tiling(kind: str, radius=None, size=None, seed: int = 0):
    return tilings.generate(kind, size=size, radius=radius, seed=seed)


def labeled(t):
    d = t.quadgraph
    return d, labeling_from_realization(d, Realization(d.positions))


@pytest.fixture(scope="session")
def square10():
    return tiling("square", radius=10)


@pytest.fixture(scope="session")
def kagome5():
    return tiling("dual-kagome", radius=5)


@pytest.fixture(scope="session")
def penrose8():
    return tiling("penrose", radius=8, seed=42)
