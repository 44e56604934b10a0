import numpy as np
import pytest

from lumen.core import LightField, View, ViewIndex
from lumen.synth import Plane, SceneSpec, generate


def make_lightfield(rng, width=8, height=8, ns=3, nt=3, drop=()):
    """Random light-field with independent view images (no scene geometry)."""
    views = {}
    for t in range(nt):
        for s in range(ns):
            if (s, t) in drop:
                continue
            views[ViewIndex(s, t)] = View(rng.uniform(0.0, 1.0, (height, width, 3)))
    return LightField(views=views, ns=ns, nt=nt, center=ViewIndex(ns // 2, nt // 2))


@pytest.fixture(scope="session")
def plane_scene():
    """64x64 plane scene with disparity 0.5, shared across tests."""
    return generate(SceneSpec(Plane(0.5), 64, 64, texture_seed=7))
