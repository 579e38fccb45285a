import math
from fractions import Fraction

import numpy as np
import pytest

from corrlab.lll import (
    LOG_CONSTANT,
    LLLInstance,
    SearchFailure,
    bad_event_holds,
    choose_d0,
    disagreement_count,
    first_violation,
    moser_tardos_search,
    scan_events,
)
from corrlab.measures import d_window_min
from corrlab.sequences import Word


def brute_disagreements(w, i, d, m):
    return sum(1 for j in range(d) if len({int(w[i + s * d + j]) for s in range(m)}) > 1)


class TestDisagreement:
    def test_constant(self):
        assert disagreement_count(np.zeros(30, dtype=np.int64), 3, 7, 3) == 0

    def test_full(self):
        d = 9
        w = np.array([0] * d + [1] * d)
        assert disagreement_count(w, 0, d, 2) == d

    def test_random_brute(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            w = rng.integers(0, 2, size=40)
            i = int(rng.integers(0, 26))
            assert disagreement_count(w, i, 5, 3) == brute_disagreements(w, i, 5, 3)

    def test_overflow(self):
        with pytest.raises(ValueError):
            disagreement_count(np.zeros(10, dtype=np.int64), 1, 5, 2)


class TestBadEvent:
    def test_constant_word(self):
        inst = LLLInstance(2, 2, 0.2, 40, 10)
        assert bad_event_holds(np.zeros(40, dtype=np.int64), 0, 10, inst)

    def test_full_disagreement(self):
        inst = LLLInstance(2, 2, 0.2, 40, 10)
        w = np.array([0] * 10 + [1] * 10 + [0] * 20)
        assert not bad_event_holds(w, 0, 10, inst)

    def test_boundary(self):
        inst = LLLInstance(2, 2, 0.2, 20, 10)
        assert inst.threshold(10) == 3
        w = np.zeros(20, dtype=np.int64)
        w[10:13] = 1
        assert disagreement_count(w, 0, 10, 2) == 3
        assert not bad_event_holds(w, 0, 10, inst)
        w[12] = 0
        assert bad_event_holds(w, 0, 10, inst)


class TestInstance:
    def test_too_short(self):
        with pytest.raises(ValueError):
            LLLInstance(2, 2, 0.2, 19, 10)

    @pytest.mark.parametrize("eps", [0, 1, -0.1])
    def test_eps_range(self, eps):
        with pytest.raises(ValueError):
            LLLInstance(2, 2, eps, 100, 10)

    def test_threshold_at_most_d(self):
        inst = LLLInstance(3, 3, 0.05, 300, 5)
        assert all(inst.threshold(d) <= d for d in range(inst.d0, inst.d_max + 1))


class TestChooseD0:
    @staticmethod
    def conditions(eps, m, d0, c=LOG_CONSTANT):
        a = eps * eps / 2
        den = math.exp(a) - 1
        rhs = eps * eps / (2 * m * c)
        first = math.exp(-a * (d0 - 1)) / den <= rhs
        second = (math.exp(-a * (d0 - 1)) * (1 - d0) + d0 * math.exp(-a * (d0 - 2))) / den ** 2 <= rhs * d0
        return first and second and math.exp(-a * d0) <= 0.5

    @pytest.mark.parametrize("eps,m", [(0.5, 2), (0.3, 2), (0.2, 2), (0.15, 2), (0.1, 2), (0.3, 3)])
    def test_minimal(self, eps, m):
        d0 = choose_d0(eps, m)
        assert self.conditions(eps, m, d0)
        assert not self.conditions(eps, m, d0 - 1)

    def test_frozen(self):
        assert [choose_d0(e, 2) for e in (0.5, 0.3, 0.2, 0.15, 0.1)] == [44, 164, 448, 898, 2341]

    def test_monotone(self):
        assert choose_d0(0.1, 2) >= choose_d0(0.3, 2)

    def test_constant_valid(self):
        # -log(1 - u) <= c u on [0, 1/2], tight at u = 1/2
        for u in np.linspace(1e-6, 0.5, 1000):
            assert -math.log1p(-u) <= LOG_CONSTANT * u + 1e-15

    def test_range(self):
        with pytest.raises(ValueError):
            choose_d0(1.0, 2)


class TestSearch:
    def test_no_constraints(self):
        # 1 - 1/2 - 0.6 < 0, so t(d) = 0 and the first draw is kept
        res = moser_tardos_search(LLLInstance(2, 2, 0.6, 100, 5, seed=3))
        assert res.resamples == 0 and res.verified

    @pytest.mark.parametrize("k,m,eps,n,d0", [
        (2, 2, 0.3, 600, 10),
        (2, 2, 0.25, 600, 20),
        (3, 2, 0.3, 600, 6),
        (2, 3, 0.3, 600, 6),
    ])
    def test_resampling_converges(self, k, m, eps, n, d0):
        inst = LLLInstance(k, m, eps, n, d0, seed=0)
        res = moser_tardos_search(inst)
        # small d0 makes the first draw fail somewhere, so the loop really runs
        assert res.resamples > 0
        assert first_violation(res.word, inst) is None
        violations, density = scan_events(res.word, inst)
        assert violations == 0 and density >= inst.target_density
        assert res.word.size == n and res.word.min() >= 0 and res.word.max() < k

    def test_deterministic(self):
        inst = LLLInstance(2, 2, 0.3, 600, 10, seed=9)
        a, b = moser_tardos_search(inst), moser_tardos_search(inst)
        assert np.array_equal(a.word, b.word) and a.resamples == b.resamples

    def test_failure_carries_violation(self):
        inst = LLLInstance(2, 2, 0.15, 400, 20, seed=0, max_resamples=5)
        with pytest.raises(SearchFailure) as exc:
            moser_tardos_search(inst)
        assert exc.value.last_violation is not None
        d, i = exc.value.last_violation
        assert 20 <= d <= 200 and 0 <= i <= 400 - 2 * d

    def test_scan_counts_violations(self):
        inst = LLLInstance(2, 2, 0.2, 40, 10)
        violations, density = scan_events(np.zeros(40, dtype=np.int64), inst)
        # every (d, i) with 10 <= d <= 20, 0 <= i <= 40 - 2d is violated
        assert violations == sum(40 - 2 * d + 1 for d in range(10, 21))
        assert density == 0

    def test_window_cross_check(self):
        inst = LLLInstance(2, 3, 0.3, 600, 6, seed=0)
        res = moser_tardos_search(inst)
        w = Word(res.word, 2)
        for d in range(inst.d0, inst.d_max + 1):
            got = d_window_min(w, (0, d, 2 * d), d, inst.n - 2 * d)
            assert got >= inst.target_density
        assert res.to_dict()["min_disagreement_density"] == float(res.min_disagreement_density)
        assert res.min_disagreement_density >= Fraction(0)
