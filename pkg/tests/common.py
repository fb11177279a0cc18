from beartype import beartype
from pathlib import Path
import cProfile
from pstats import Stats
import unittest

import numpy as np

EPS = 1e-9
SEED = 20240611


def close(a, b, tol: float = EPS) -> bool:
    """relative above magnitude 1, absolute below"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    ok = bool(np.max(np.abs(a - b)) <= tol * scale)
    if not ok:
        print(a, b)
    return ok


def rng(offset: int = 0) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


@beartype
class ProfiledTestCase(unittest.TestCase):
    def setUp(self):
        self.pr = cProfile.Profile()
        self.pr.enable()

    def tearDown(self) -> None:
        p = Stats(self.pr)
        p.strip_dirs()
        p.sort_stats("cumtime")
        profile_dir = Path(".profile")
        profile_dir.mkdir(exist_ok=True)
        p.dump_stats(profile_dir / self.id())


def sample_points(model, gen, count):
    """random points of a gallery model away from the chart boundary"""
    if model.name == "halfplane":
        return [
            np.array([gen.uniform(-2, 2), gen.uniform(0.5, 2)]) for _ in range(count)
        ]
    if model.name == "disc":
        r = gen.uniform(0, 0.5, size=count)
        a = gen.uniform(0, 2 * np.pi, size=count)
        return list(np.stack([r * np.cos(a), r * np.sin(a)], axis=1))
    return list(gen.uniform(-2, 2, size=(count, model.dim)))


def unit_pair(dim, gen):
    """two unit vectors at an angle between pi/4 and 3pi/4"""
    if dim == 2:
        a = gen.uniform(0, 2 * np.pi)
        b = a + gen.uniform(np.pi / 4, 3 * np.pi / 4)
        return np.array([np.cos(a), np.sin(a)]), np.array([np.cos(b), np.sin(b)])
    q, _ = np.linalg.qr(gen.normal(size=(dim, dim)))
    return q[:, 0], q[:, 1]
