"""Shared fixtures: seeded samplers, reference surfaces and the high-precision oracle."""

import math
import random

import mpmath
import pytest

from src.teich.surface import SurfaceFN, standard_topology

mpmath.mp.dps = 50


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_surface(rng: random.Random, genus: int, n_boundaries: int, geodesic: bool = False) -> SurfaceFN:
    """Surface over the standard graph with moderate lengths and mixed boundaries."""
    topology = standard_topology(genus, n_boundaries)
    boundaries = []
    for _ in range(n_boundaries):
        if geodesic and rng.random() < 0.5:
            boundaries.append(rng.uniform(0.3, 1.5))
        else:
            boundaries.append(rng.uniform(-2.0, -0.3))
    lengths = [rng.uniform(2.5, 4.0) for _ in range(topology.n_curves)]
    twists = [rng.uniform(-2.0, 2.0) for _ in range(topology.n_curves)]
    return SurfaceFN.build(topology, boundaries, lengths, twists)


@pytest.fixture
def torus_surface() -> SurfaceFN:
    return SurfaceFN.build(standard_topology(1, 1), [-1.1], [2.2], [0.35])


@pytest.fixture
def genus_two_surface() -> SurfaceFN:
    return SurfaceFN.build(standard_topology(2, 1), [-0.9], [2.8, 3.1, 3.4, 2.6], [0.3, -0.6, 1.2, 0.15])


def rel_close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), math.ulp(1.0))
