"""Exact checks of the mixed-subset counting bound and the binomial tail bound.

Every inequality here is decided in exact rational arithmetic.  The one
transcendental quantity, exp(-2 (dp - t)^2 / d), is evaluated with the
decimal module at a precision far beyond any gap the checks can hit.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

import numpy as np

from corrlab.expsums import BoundReport

_PREC = 60


@dataclass(frozen=True)
class MultisetProfile:
    """b_i objects of type i; n = sum b_i."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(b) for b in self.counts)
        if not counts or any(b < 0 for b in counts):
            raise ValueError("profile needs k >= 1 non-negative counts")
        if sum(counts) < 1:
            raise ValueError("profile must hold at least one object")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)


def mixed_subset_count(profile: MultisetProfile, d: int) -> int:
    """C(n, d) - sum_i C(b_i, d): d-subsets holding two objects of different types."""
    if not 1 <= d <= profile.n:
        raise ValueError(f"subset size d must lie in [1, n={profile.n}]")
    return math.comb(profile.n, d) - sum(math.comb(b, d) for b in profile.counts)


def mixed_subset_brute(profile: MultisetProfile, d: int) -> int:
    """Enumerate every d-subset of labelled objects and count the mixed ones."""
    labels = [t for t, b in enumerate(profile.counts) for _ in range(b)]
    return sum(1 for sub in itertools.combinations(labels, d) if len(set(sub)) > 1)


def lemma1_bound(n: int, d: int, k: int) -> Fraction:
    """n^d / d! * (1 - 1/k^(d-1))."""
    if not 1 <= d <= n or k < 1:
        raise ValueError("need 1 <= d <= n and k >= 1")
    return Fraction(n ** d, math.factorial(d)) * (1 - Fraction(1, k ** (d - 1)))


def power_mean_holds(profile: MultisetProfile, nu: int) -> bool:
    """n^nu / k^(nu-1) <= sum_i b_i^nu."""
    return Fraction(profile.n ** nu, profile.k ** (nu - 1)) <= sum(b ** nu for b in profile.counts)


def profiles(max_n: int, max_k: int) -> Iterator[MultisetProfile]:
    """Every ordered profile with 1 <= n <= max_n objects over 1..max_k types."""
    for k in range(1, max_k + 1):
        for n in range(1, max_n + 1):
            # stars and bars over k slots
            for bars in itertools.combinations(range(n + k - 1), k - 1):
                edges = (-1,) + bars + (n + k - 1,)
                yield MultisetProfile(tuple(b - a - 1 for a, b in zip(edges, edges[1:])))


def binomial_tail(d: int, p: Fraction, t: int) -> Fraction:
    """sum_{0 <= j <= t} C(d, j) p^j (1 - p)^(d - j), exactly."""
    q = 1 - p
    return sum((math.comb(d, j) * p ** j * q ** (d - j) for j in range(0, t + 1)), Fraction(0))


def _exp_neg(x: Fraction) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = _PREC
        return (-(Decimal(x.numerator) / Decimal(x.denominator))).exp()


def _le(frac: Fraction, dec: Decimal) -> bool:
    with localcontext() as ctx:
        ctx.prec = _PREC
        return Decimal(frac.numerator) / Decimal(frac.denominator) <= dec


def hoeffding_exponent(d: int, p: Fraction, t) -> Fraction:
    return 2 * (d * p - Fraction(t)) ** 2 / d


def hoeffding_tail(d: int, p, t: int) -> float:
    """exp(-2 (dp - t)^2 / d)."""
    p = Fraction(p)
    _check_hoeffding_args(d, p, t)
    return float(_exp_neg(hoeffding_exponent(d, p, t)))


def hoeffding_check(d: int, p, t: int) -> BoundReport:
    p = Fraction(p)
    _check_hoeffding_args(d, p, t)
    tail = binomial_tail(d, p, t)
    bound = _exp_neg(hoeffding_exponent(d, p, t))
    return BoundReport("hoeffding", {"d": d, "p": str(p), "t": t},
                       float(tail), float(bound), _le(tail, bound))


def _check_hoeffding_args(d: int, p: Fraction, t: int) -> None:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if d < 1 or t < 0:
        raise ValueError("need d >= 1 and t >= 0")
    if t > d * p:
        raise ValueError(f"need t <= dp (t={t}, dp={d * p})")


def event_probability(k: int, m: int, d: int, t: int) -> Fraction:
    """Probability that m random length-d blocks disagree in fewer than t positions.

    sum_{0 <= j < t} C(d, j) ((K-1)/K)^j (1/K)^(d-j) with K = k^(m-1).
    """
    if k < 2 or m < 2:
        raise ValueError("need k, m >= 2")
    if not 0 <= t <= d:
        raise ValueError("need 0 <= t <= d")
    K = k ** (m - 1)
    p = Fraction(K - 1, K)
    return sum((math.comb(d, j) * p ** j * (1 - p) ** (d - j) for j in range(t)), Fraction(0))


@lru_cache(maxsize=None)
def _disagreement_counts(k: int, m: int, d: int) -> Tuple[int, ...]:
    # how many of the k^(m d) words of length m d have j disagreeing positions
    total = k ** (m * d)
    if total > 1 << 24:
        raise ValueError("enumeration too large")
    codes = np.arange(total, dtype=np.int64)
    sym = np.stack([(codes // k ** i) % k for i in range(m * d)], axis=1).reshape(total, m, d)
    disagree = (sym != sym[:, :1, :]).any(axis=1).sum(axis=1)
    return tuple(int(c) for c in np.bincount(disagree, minlength=d + 1))


def event_probability_enumerated(k: int, m: int, d: int, t: int) -> Fraction:
    """Same probability by running through all k^(m d) words of length m d."""
    counts = _disagreement_counts(k, m, d)
    return Fraction(sum(counts[:t]), k ** (m * d))


def event_probability_mc(k: int, m: int, d: int, t: int, samples: int, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    sym = rng.integers(0, k, size=(samples, m, d))
    disagree = (sym != sym[:, :1, :]).any(axis=1).sum(axis=1)
    return float(np.count_nonzero(disagree < t)) / samples


def search_threshold(k: int, m: int, epsilon, d: int) -> int:
    """ceil((1 - 1/k^(m-1) - epsilon) d), clamped at 0, in exact arithmetic."""
    eps = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    val = (1 - Fraction(1, k ** (m - 1)) - eps) * d
    return max(math.ceil(val), 0)


def event_bound_holds(k: int, m: int, epsilon, d: int) -> bool:
    """Pr[A_{i,d}] <= exp(-2 d epsilon^2) with t = search_threshold(...)."""
    eps = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    prob = event_probability(k, m, d, search_threshold(k, m, eps, d))
    return _le(prob, _exp_neg(2 * d * eps * eps))


def lemma1_table(max_n: int, max_k: int, max_d: int) -> Iterator[Tuple[Tuple[int, ...], int, int, int, Fraction, bool]]:
    """(profile, d, P closed form, P brute force, bound, ok) over the whole grid."""
    cache = {}
    for prof in profiles(max_n, max_k):
        for d in range(1, min(prof.n, max_d) + 1):
            key = (tuple(sorted(prof.counts)), d)
            if key not in cache:
                cache[key] = mixed_subset_brute(prof, d)
            brute = cache[key]
            closed = mixed_subset_count(prof, d)
            bound = lemma1_bound(prof.n, d, prof.k)
            yield prof.counts, d, closed, brute, bound, closed == brute and closed <= bound


def hoeffding_grid(max_d: int, ps: Sequence[Fraction]) -> Iterator[BoundReport]:
    for d in range(1, max_d + 1):
        for p in ps:
            for t in range(0, math.floor(d * p) + 1):
                yield hoeffding_check(d, p, t)
