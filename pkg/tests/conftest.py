import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tga.graph import DiscreteGraph  # noqa: E402


@pytest.fixture
def rng():
    return random.Random(int(os.environ.get("TGA_SEED", "0")))


def G(vertices, edges, families=(), receivers=()):
    return DiscreteGraph.build(vertices, edges, families, receivers)


@pytest.fixture
def o2():
    return G(["v"], [("a", "v", "v"), ("b", "v", "v")])


@pytest.fixture
def loop():
    return G(["v"], [("l", "v", "v")])


@pytest.fixture
def edge_uv():
    return G(["u", "v"], [("e", "u", "v")])
