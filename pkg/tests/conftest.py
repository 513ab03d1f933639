import functools

import pytest

from fraisse_forcing import BuildConfig, GroundSet, Language, Structure, run

GRAPH = Language.of(E=2)
ORDER = Language.of(**{"<": 2})


def graph(universe, edges=()):
    sym = [(a, b) for a, b in edges] + [(b, a) for a, b in edges]
    return Structure.build(GRAPH, universe, {"E": sym})


def order(*points):
    """Strict linear order listing ``points`` from least to greatest."""
    pairs = [(points[i], points[j]) for i in range(len(points)) for j in range(i + 1, len(points))]
    return Structure.build(ORDER, points, {"<": pairs})


@functools.lru_cache(maxsize=None)
def cached_build(class_name, steps, seed=0, grounds=()):
    return run(BuildConfig(class_name, steps, seed, tuple(GroundSet.parse(g) for g in grounds)))


@pytest.fixture
def build():
    return cached_build
