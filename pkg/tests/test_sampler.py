import math

import numpy as np
import pytest

from privmrf.models import matched_pairs_ising
from privmrf.oracle import enumerate_states, exact_distribution, state_index
from privmrf.sampler import Dataset, _gibbs_site_probs, exact_sample, gibbs_sample
from conftest import random_ising, random_pairwise


def test_dataset_validation():
    Dataset(2, 2, np.array([[1, -1], [1, 1]]))
    Dataset(2, 2, np.array([[1, 2], [1, 1]]))  # integer convention for k=2
    Dataset(2, 3, np.array([[1, 3]]))
    with pytest.raises(ValueError):
        Dataset(2, 2, np.array([[0, 1]]))
    with pytest.raises(ValueError):
        Dataset(2, 3, np.array([[1, 4]]))


def test_dataset_csv_roundtrip(tmp_path):
    d = Dataset(3, 2, np.array([[1, -1, 1], [-1, -1, 1]]))
    path = tmp_path / "data.csv"
    d.save_csv(path)
    assert path.read_text() == "1,-1,1\n-1,-1,1\n"
    d2 = Dataset.load_csv(path, k=2)
    assert np.array_equal(d.rows, d2.rows)


def test_exact_sample_empty_and_deterministic():
    m = matched_pairs_ising(4, 0.5)
    assert exact_sample(m, 0, seed=1).n == 0
    a = exact_sample(m, 50, seed=7)
    b = exact_sample(m, 50, seed=7)
    assert np.array_equal(a.rows, b.rows)
    assert not np.array_equal(a.rows, exact_sample(m, 50, seed=8).rows)


def test_exact_sample_cell_frequency():
    # Pr(++) for one matched pair at eta = ln 2 is (1/2) e^eta/(e^eta + e^-eta)... = 1/3
    m = matched_pairs_ising(2, math.log(2.0))
    n = 100_000
    d = exact_sample(m, n, seed=11)
    freq = np.mean((d.rows[:, 0] == 1) & (d.rows[:, 1] == 1))
    pr = 1.0 / 3.0
    assert abs(freq - pr) <= 4.0 * math.sqrt(pr * (1 - pr) / n)


def test_gibbs_zero_width_is_uniform():
    m = matched_pairs_ising(4, 0.0)
    n = 50_000
    d = gibbs_sample(m, n, seed=3, burn_in=5)
    assert abs(np.mean(d.rows[:, 0] * d.rows[:, 1])) <= 4.0 / math.sqrt(n)


def test_gibbs_matches_oracle_parity():
    m = matched_pairs_ising(2, math.log(2.0))
    d = gibbs_sample(m, 100_000, seed=5, burn_in=50)
    assert abs(np.mean(d.rows[:, 0] * d.rows[:, 1]) - 1.0 / 3.0) <= 0.02


def test_gibbs_pairwise_symbols(rng):
    m = random_pairwise(rng, 3, 3, width=1.0)
    d = gibbs_sample(m, 500, seed=6, burn_in=20)
    assert set(np.unique(d.rows)) <= {1, 2, 3}


def test_gibbs_kernel_invariance(rng):
    """One analytic site update applied to the exact table is a fixed point."""
    for model in (random_ising(rng, 4, width=1.5), random_pairwise(rng, 3, 3, width=1.5)):
        k = model.k
        signed = model.__class__.__name__ == "IsingModel"
        dist = exact_distribution(model)
        states = enumerate_states(model.p, k, signed=signed)
        for i in range(model.p):
            probs = _gibbs_site_probs(model, states, i)
            new = np.zeros_like(dist.probs)
            for s_idx, z in enumerate(states):
                symbols = (-1, 1) if signed else range(1, k + 1)
                for c, val in enumerate(symbols):
                    z2 = z.copy()
                    z2[i] = val
                    pr = probs[s_idx, c] if probs.ndim == 2 else (
                        probs[s_idx] if val == 1 else 1.0 - probs[s_idx]
                    )
                    new[state_index(z2, k, signed)] += dist.probs[s_idx] * pr
            assert np.allclose(new, dist.probs, atol=1e-10)
