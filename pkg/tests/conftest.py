import numpy as np
import pytest


def random_spd(rng: np.random.Generator, p: int, cond: float = 20.0) -> np.ndarray:
    """Random SPD matrix with eigenvalues spread over ``[1, cond]``."""
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    q = q * np.sign(np.diag(r))
    w = np.exp(rng.uniform(0.0, np.log(cond), p))
    return (q * w) @ q.T


def random_symmetric(rng: np.random.Generator, m: int, norm: float) -> np.ndarray:
    """Random symmetric matrix with spectral norm exactly ``norm``."""
    a = rng.standard_normal((m, m))
    a = (a + a.T) / 2
    return a * (norm / np.max(np.abs(np.linalg.eigvalsh(a))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
