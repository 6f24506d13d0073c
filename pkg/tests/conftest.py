import numpy as np
import pytest

from grassopt import StiefelPoint, project_tangent, thin_qr


def random_stiefel(n, p, seed):
    rng = np.random.default_rng(seed)
    q, _ = thin_qr(rng.standard_normal((n, p)))
    return StiefelPoint(q)


def random_tangent(point, seed):
    rng = np.random.default_rng(seed)
    return project_tangent(point, rng.standard_normal(point.shape))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
