import numpy as np
import pytest

from cylpack import geom


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_frame(d: int, m: int, rng: np.random.Generator) -> geom.Frame:
    return geom.orthonormalize(rng.standard_normal((m, d)))


def random_spd(d: int, rng: np.random.Generator,
               axis_range=(0.5, 2.0)) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    axes = rng.uniform(*axis_range, size=d)
    return q @ np.diag(1.0 / axes**2) @ q.T
