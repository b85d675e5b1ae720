from __future__ import annotations

import pytest

from detkit.cotangent import Presentation
from detkit.rings import Ring


def make_pres(names, *gens, base_order=None):
    ring = Ring(names)
    return Presentation(ring, tuple(ring.parse(g) for g in gens), base_order)


@pytest.fixture
def R2():
    return Ring(["x", "y"])


@pytest.fixture
def R3():
    return Ring(["x", "y", "w"])
