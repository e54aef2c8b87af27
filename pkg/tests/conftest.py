import numpy as np
import pytest

from privmrf.models import BinaryMRF, IsingModel, PairwiseModel, center_pairwise, model_width
from privmrf.polynomial import MultilinearPolynomial


def random_ising(rng: np.random.Generator, p: int, width: float = 2.0) -> IsingModel:
    """Random symmetric Ising model rescaled to the requested width."""
    A = rng.normal(size=(p, p))
    A = (A + A.T) / 2.0
    np.fill_diagonal(A, 0.0)
    theta = rng.normal(size=p)
    m = IsingModel(p, A, theta)
    scale = width * rng.uniform(0.3, 1.0) / max(model_width(m), 1e-12)
    return IsingModel(p, A * scale, theta * scale)


def random_pairwise(rng: np.random.Generator, p: int, k: int, width: float = 2.0) -> PairwiseModel:
    W = {}
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            if rng.random() < 0.7:
                W[(i, j)] = rng.normal(size=(k, k))
    Theta = rng.normal(size=(p, k))
    m = center_pairwise(PairwiseModel(p, k, W, Theta))
    scale = width * rng.uniform(0.3, 1.0) / max(model_width(m), 1e-12)
    return PairwiseModel(
        m.p, m.k, {key: mat * scale for key, mat in m.W.items()}, m.Theta * scale
    )


def random_mrf(rng: np.random.Generator, p: int, t: int, width: float = 2.0) -> BinaryMRF:
    terms = {}
    idx = list(range(1, p + 1))
    for size in range(1, t + 1):
        for _ in range(max(1, p // size)):
            mono = tuple(sorted(rng.choice(idx, size=size, replace=False).tolist()))
            terms[mono] = rng.normal()
    m = BinaryMRF(p, t, MultilinearPolynomial(p, terms))
    scale = width * rng.uniform(0.3, 1.0) / max(model_width(m), 1e-12)
    return BinaryMRF(
        p, t, MultilinearPolynomial(p, {k: v * scale for k, v in m.h.terms.items()})
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240824)
