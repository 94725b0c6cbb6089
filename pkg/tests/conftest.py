import pytest

import emgraph as eg


@pytest.fixture
def sub():
    s = eg.Substrate()
    yield s
    s.close()


@pytest.fixture
def tight_sub():
    """Small-memory substrate that forces multi-chunk sorts."""
    s = eg.Substrate(eg.EmConfig(4096, 64, 1))
    yield s
    s.close()


def random_undirected(rng, n_max=8, m_max=None):
    n = rng.randint(2, n_max)
    cap = n * (n - 1) // 2
    m = rng.randint(0, cap if m_max is None else min(m_max, cap))
    return n, rng.sample([(i, j) for i in range(n) for j in range(i + 1, n)], m)
