import numpy as np
import pytest
from hypothesis import strategies as st

from corrlab.sequences import GTable, PrimeGRS, block01_sequence, rudin_shapiro, ternary_diagonal

PRIMES = [2, 3, 5, 7]


def recurrence_prefix(k, g, init, N):
    """Forward fill of a(nk + j) = a(n) + g(j, n), no digit tricks."""
    a = list(init[:min(N, k)])
    for n in range(k, N):
        q, j = divmod(n, k)
        a.append(a[q] + g(j, q))
    return np.array(a, dtype=np.int64) % k


@st.composite
def admissible_tables(draw, k=None):
    """g(j, n) = s*j*pi(n) + c_j + h(n): the n-dependence of every column difference is a permutation."""
    if k is None:
        k = draw(st.sampled_from(PRIMES))
    s = draw(st.integers(1, k - 1))
    pi = draw(st.permutations(range(k)))
    c = draw(st.lists(st.integers(0, k - 1), min_size=k, max_size=k))
    h = draw(st.lists(st.integers(0, k - 1), min_size=k, max_size=k))
    return GTable.from_function(k, lambda j, n: s * j * pi[n] + c[j] + h[n])


@st.composite
def prime_specs(draw):
    g = draw(admissible_tables())
    init = draw(st.lists(st.integers(0, g.k - 1), min_size=g.k, max_size=g.k))
    return PrimeGRS(g.k, g, tuple(init))


@pytest.fixture
def rs():
    return rudin_shapiro()


@pytest.fixture
def ex2():
    return block01_sequence()


@pytest.fixture
def ex3():
    return ternary_diagonal()
