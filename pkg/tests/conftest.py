import numpy as np
import pytest

from pgarch.model import ModelSpec, gaussian, student_t, unit


def garch11(alpha0, alpha1, beta1, innovation=None):
    """PGARCH(1,1) with per-season sequences (scalars mean s = 1)."""
    alpha0 = np.atleast_1d(np.asarray(alpha0, dtype=float))
    s = alpha0.size
    alpha1 = np.broadcast_to(np.asarray(alpha1, dtype=float), (s,))
    beta1 = np.broadcast_to(np.asarray(beta1, dtype=float), (s,))
    return ModelSpec(s, 1, 1, alpha0, alpha1[:, None], beta1[:, None],
                     innovation or gaussian())


def random_spec(rng, s=None, p=None, q=None, scale=1.0, innovation=None):
    """Random PGARCH(p,q); total persistence per season is about U(0, scale)."""
    s = s if s is not None else int(rng.integers(1, 5))
    if p is None or q is None:
        while True:
            p, q = (int(k) for k in rng.integers(0, 3, size=2))
            if p + q >= 1:
                break
    alpha0 = rng.uniform(0.05, 1.0, size=s)
    coef = rng.dirichlet(np.ones(p + q + 1), size=s)[:, : p + q]
    coef *= rng.uniform(0.0, scale, size=(s, 1))
    if innovation is None:
        innovation = gaussian() if rng.random() < 0.7 else student_t(float(rng.uniform(9, 30)))
    return ModelSpec(s, p, q, alpha0, coef[:, :p], coef[:, p:], innovation)


@pytest.fixture
def running():
    """s = 1 gaussian GARCH(1,1) with alpha0 = 0.1, alpha1 = 0.2, beta1 = 0.7."""
    return garch11(0.1, 0.2, 0.7)


@pytest.fixture
def two_season():
    return garch11([0.1, 0.2], [0.4, 0.1], [0.3, 0.2])


@pytest.fixture
def explosive_season_unit():
    """theta1 = (1.2, 0.5) with deterministic innovations."""
    return garch11([0.1, 0.2], [0.6, 0.25], [0.6, 0.25], unit())


@pytest.fixture
def noise_only():
    return ModelSpec(3, 1, 1, [0.5, 1.0, 2.0], [[0.0]] * 3, [[0.0]] * 3)
