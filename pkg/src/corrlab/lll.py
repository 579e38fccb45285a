"""Finite witnesses for block-disagreement words via Moser-Tardos resampling.

For block length d and start i, the event A(i, d) says the m consecutive
blocks x[i:i+d], x[i+d:i+2d], ... disagree in fewer than t(d) positions.
The search draws a random word and, while some event holds, redraws the
m*d symbols that event depends on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from corrlab.combinatorics import search_threshold
from corrlab.rng import counter_symbols

LOG_CONSTANT = 2 * math.log(2)  # -log(1-u) <= c u on [0, 1/2]


class SearchFailure(RuntimeError):
    def __init__(self, message: str, last_violation: Tuple[int, int] | None):
        super().__init__(message)
        self.last_violation = last_violation


def _exact_eps(epsilon) -> Fraction:
    return Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)


@dataclass(frozen=True)
class LLLInstance:
    k: int
    m: int
    epsilon: float
    n: int
    d0: int
    seed: int = 0
    max_resamples: int = 100_000

    def __post_init__(self):
        if self.k < 2 or self.m < 2:
            raise ValueError("need k, m >= 2")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.d0 < 1:
            raise ValueError("d0 must be >= 1")
        if self.m * self.d0 > self.n:
            raise ValueError(f"word length n={self.n} is shorter than m*d0={self.m * self.d0}")

    @property
    def d_max(self) -> int:
        return self.n // self.m

    def threshold(self, d: int) -> int:
        return search_threshold(self.k, self.m, _exact_eps(self.epsilon), d)

    @property
    def target_density(self) -> Fraction:
        return 1 - Fraction(1, self.k ** (self.m - 1)) - _exact_eps(self.epsilon)


def disagreement_count(word, i: int, d: int, m: int) -> int:
    """Positions j < d where word[i+j], word[i+d+j], ... are not all equal."""
    w = np.asarray(word)
    if i < 0 or d < 1 or i + m * d > w.size:
        raise ValueError(f"blocks [{i}, {i + m * d}) do not fit in a word of length {w.size}")
    blocks = w[i:i + m * d].reshape(m, d)
    return int(np.count_nonzero((blocks != blocks[0]).any(axis=0)))


def bad_event_holds(word, i: int, d: int, inst: LLLInstance) -> bool:
    return disagreement_count(word, i, d, inst.m) < inst.threshold(d)


def choose_d0(epsilon: float, m: int, c: float = LOG_CONSTANT) -> int:
    """Smallest d0 meeting both tail-sum conditions and exp(-d0 eps^2 / 2) <= 1/2."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    a = 0.5 * epsilon * epsilon
    denom = math.expm1(a)
    rhs = epsilon * epsilon / (2 * m * c)
    d0 = 1
    while True:
        first = math.exp(-a * (d0 - 1)) / denom <= rhs
        second = ((math.exp(-a * (d0 - 1)) * (1 - d0) + d0 * math.exp(-a * (d0 - 2)))
                  / denom ** 2 <= rhs * d0)
        if first and second and math.exp(-a * d0) <= 0.5:
            return d0
        d0 += 1


def _window_counts(word: np.ndarray, d: int, m: int) -> np.ndarray:
    # disagreement count for every start i in [0, n - m d], via a prefix sum
    span = word.size - (m - 1) * d
    base = word[:span]
    flags = np.zeros(span, dtype=bool)
    for s in range(1, m):
        flags |= word[s * d:s * d + span] != base
    cs = np.concatenate(([0], np.cumsum(flags, dtype=np.int64)))
    return cs[d:] - cs[:-d]


def first_violation(word: np.ndarray, inst: LLLInstance) -> Tuple[int, int] | None:
    """Lexicographically smallest (d, i) whose event holds, or None."""
    for d in range(inst.d0, inst.d_max + 1):
        counts = _window_counts(word, d, inst.m)
        bad = np.flatnonzero(counts < inst.threshold(d))
        if bad.size:
            return d, int(bad[0])
    return None


def scan_events(word, inst: LLLInstance) -> Tuple[int, Fraction | None]:
    """Independent exhaustive scan: (number of violated events, min disagreement density).

    Builds every block tuple with a strided view instead of prefix sums.
    """
    w = np.asarray(word)
    violations, density = 0, None
    for d in range(inst.d0, inst.d_max + 1):
        starts = w.size - inst.m * d + 1
        view = np.lib.stride_tricks.sliding_window_view(w, inst.m * d)[:starts]
        blocks = view.reshape(starts, inst.m, d)
        counts = (blocks != blocks[:, :1, :]).any(axis=1).sum(axis=1)
        violations += int(np.count_nonzero(counts < inst.threshold(d)))
        low = Fraction(int(counts.min()), d)
        density = low if density is None else min(density, low)
    return violations, density


@dataclass
class SearchResult:
    word: np.ndarray
    resamples: int
    d0: int
    verified: bool
    min_disagreement_density: Fraction | None

    def to_dict(self) -> dict:
        dens = self.min_disagreement_density
        return {"d0": self.d0, "resamples": self.resamples, "verified": self.verified,
                "min_disagreement_density": None if dens is None else float(dens)}

    def word_string(self) -> str:
        return "".join(str(int(v)) if v < 10 else f"[{int(v)}]" for v in self.word)


def moser_tardos_search(inst: LLLInstance) -> SearchResult:
    word = counter_symbols(inst.k, inst.seed, 0, inst.n, stream=0)
    resamples = 0
    last = None
    while True:
        hit = first_violation(word, inst)
        if hit is None:
            break
        last = hit
        if resamples >= inst.max_resamples:
            raise SearchFailure(f"gave up after {resamples} resamples; event (d, i) = {hit} still holds", hit)
        d, i = hit
        resamples += 1
        lo, hi = i, i + inst.m * d
        word[lo:hi] = counter_symbols(inst.k, inst.seed, lo, hi, stream=resamples)
    violations, density = scan_events(word, inst)
    if violations:
        raise SearchFailure(f"post-verification found {violations} violated events", last)
    return SearchResult(word, resamples, inst.d0, True, density)
