"""Exponential sums over residue histograms and numeric checks of their explicit bounds.

All per-index state is the integer histogram of (a(n + r) - a(n) + f(n)) mod k.
Complex arithmetic only happens when a histogram is evaluated at some h, so
results do not depend on chunking or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Sequence, Tuple

import numpy as np

from corrlab.measures import corr_sum
from corrlab.parallel import DEFAULT_CHUNK, chunk_ranges, map_chunks
from corrlab.sequences import PrimeGRS, SquarefreeGRS, as_source


@dataclass(frozen=True)
class PeriodicF:
    """A k-periodic integer function, stored as its values on 0..k-1 reduced mod k."""

    k: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.k:
            raise ValueError(f"periodic function needs exactly {self.k} values")
        object.__setattr__(self, "values", tuple(int(v) % self.k for v in self.values))

    @classmethod
    def zero(cls, k: int) -> "PeriodicF":
        return cls(k, (0,) * k)

    def __call__(self, n: int) -> int:
        return self.values[n % self.k]

    def is_permutation(self) -> bool:
        return sorted(self.values) == list(range(self.k))

    def over(self, lo: int, hi: int) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)[np.arange(lo, hi) % self.k]


@dataclass
class ResidueHistogram:
    k: int
    counts: np.ndarray

    @property
    def N(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "ResidueHistogram") -> "ResidueHistogram":
        if other.k != self.k:
            raise ValueError("cannot merge histograms with different moduli")
        return ResidueHistogram(self.k, self.counts + other.counts)

    def to_csv_rows(self):
        return [(c, int(n)) for c, n in enumerate(self.counts)]


@dataclass
class BoundReport:
    bound_name: str
    params: Dict[str, Any]
    observed: float
    bound: float
    passed: bool | None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.bound - self.observed

    def to_dict(self) -> dict:
        out = {"bound_name": self.bound_name, "params": self.params,
               "observed": self.observed, "bound": self.bound,
               "margin": self.margin, "pass": self.passed}
        out.update(self.extra)
        return out


def _diff_chunk(src, r: int, f: PeriodicF | None, lo: int, hi: int, start: int) -> np.ndarray:
    # residues of x[n + start + r] - x[n + start] + f(n) for n in [lo, hi)
    x = src.window(lo + start, hi + start + r)
    d = x[r:r + hi - lo] - x[:hi - lo]
    if f is not None:
        d = d + f.over(lo, hi)
    return d % src.k


def residue_histogram(source, r: int, N: int, f: PeriodicF | None = None, *,
                      start: int = 0, k: int | None = None, threads: int | None = None,
                      chunk: int = DEFAULT_CHUNK) -> ResidueHistogram:
    """counts[c] = #{n < N : x(n + start + r) - x(n + start) + f(n) = c mod k}."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if r < 0:
        raise ValueError("offset r must be >= 0")
    src = as_source(source, k)
    if f is not None and f.k != src.k:
        raise ValueError("f must have period k")

    def part(lo: int, hi: int) -> np.ndarray:
        return np.bincount(_diff_chunk(src, r, f, lo, hi, start), minlength=src.k)

    parts = map_chunks(part, chunk_ranges(0, N, chunk), threads)
    return ResidueHistogram(src.k, np.sum(parts, axis=0).astype(np.int64))


def shift_histograms(source, rs: Sequence[int], N: int, *, k: int | None = None) -> Dict[int, ResidueHistogram]:
    """Histograms of x(n + r) - x(n) mod k for several r over one shared prefix."""
    src = as_source(source, k)
    kk = src.k
    x = src.window(0, N + max(rs))
    # differences lie in [-(k-1), k-1]; count them shifted, then fold negatives
    shifted = x.astype(np.int64) + (kk - 1)
    base = x[:N]
    out = {}
    for r in rs:
        raw = np.bincount(shifted[r:r + N] - base, minlength=2 * kk - 1)
        counts = raw[kk - 1:].copy()
        counts[1:] += raw[:kk - 1]
        out[r] = ResidueHistogram(kk, counts.astype(np.int64))
    return out


def _roots(k: int, h: int) -> np.ndarray:
    c = (h * np.arange(k)) % k
    return np.exp(2j * np.pi * c / k)


def gamma_eval(hist: ResidueHistogram, h: int) -> complex:
    """sum_c counts[c] * e(h c / k)."""
    if not 1 <= h < hist.k:
        raise ValueError(f"h must lie in [1, {hist.k - 1}], got {h}")
    return complex(np.dot(hist.counts.astype(np.float64), _roots(hist.k, h)))


def gamma_direct(source, r: int, N: int, h: int, f: PeriodicF | None = None, *,
                 k: int | None = None) -> complex:
    """Term-by-term sum of e(h (x(n + r) - x(n) + f(n)) / k); the reference for gamma_eval."""
    src = as_source(source, k)
    x = src.window(0, N + r)
    total = 0j
    for n in range(N):
        u = int(x[n + r]) - int(x[n]) + (f(n) if f is not None else 0)
        total += complex(math.cos(2 * math.pi * h * u / src.k), math.sin(2 * math.pi * h * u / src.k))
    return total


def prefix_gammas(source, r: int, N: int, f: PeriodicF | None = None, *,
                  k: int | None = None, chunk: int = 1 << 16) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (ns, |gamma_n| per h) for every prefix length n in 1..N, chunk by chunk.

    Each prefix value comes from exact running residue counts, never from a
    floating-point running sum.  Row h-1 of the magnitude array belongs to h.
    """
    src = as_source(source, k)
    kk = src.k
    roots = np.stack([_roots(kk, h) for h in range(1, kk)])
    running = np.zeros(kk, dtype=np.int64)
    for lo, hi in chunk_ranges(0, N, chunk):
        d = _diff_chunk(src, r, f, lo, hi, 0)
        onehot = np.zeros((kk, hi - lo), dtype=np.int64)
        onehot[d, np.arange(hi - lo)] = 1
        counts = np.cumsum(onehot, axis=1) + running[:, None]
        running = counts[:, -1].copy()
        yield np.arange(lo + 1, hi + 1), np.abs(roots @ counts.astype(np.float64))


def prop_use_check(source, r1: int, r2: int, N: int, *, k: int | None = None,
                   threads: int | None = None) -> Tuple[float, float]:
    """Compare the delta sum with N(1 - 1/k) - (1/k) sum_h gamma_h.

    Returns (|LHS - Re RHS|, |Im RHS|).  The left side comes from the
    measures module, the right side from a residue histogram started at r1.
    """
    if not 0 <= r1 < r2:
        raise ValueError("need 0 <= r1 < r2")
    src = as_source(source, k)
    lhs = corr_sum(src, (r1, r2), N, threads=threads).delta_sum
    hist = residue_histogram(src, r2 - r1, N, start=r1, threads=threads)
    kk = src.k
    rhs = N * (1 - 1 / kk) - sum(gamma_eval(hist, h) for h in range(1, kk)) / kk
    return abs(lhs - rhs.real), abs(rhs.imag)


def gr2_bound(k: int, N: int) -> float:
    """k(k+3)/(2 ln k) * ln N + k - 1, the bound on |gamma_N(1, f)| for N > k."""
    if N <= k:
        raise ValueError(f"bound needs N > k (N={N}, k={k})")
    return k * (k + 3) / (2 * math.log(k)) * math.log(N) + k - 1


def _require_prime_grs(spec) -> None:
    if not isinstance(spec, PrimeGRS):
        raise ValueError("bound applies to prime-base GRS sequences only")


def verify_gr2(spec, f: PeriodicF | None, N: int, *, all_prefixes: bool = False,
               threads: int | None = None) -> BoundReport:
    """max_h |gamma_N(1, f)| against the gr2 bound.

    With ``all_prefixes`` every prefix length k < n <= N is checked and the
    report carries the prefix with the smallest margin.
    """
    _require_prime_grs(spec)
    k = spec.k
    gr2_bound(k, N)
    f = f or PeriodicF.zero(k)
    params = {"k": k, "r": 1, "N": N, "f": list(f.values)}
    if not all_prefixes:
        hist = residue_histogram(spec, 1, N, f, threads=threads)
        obs = max(abs(gamma_eval(hist, h)) for h in range(1, k))
        b = gr2_bound(k, N)
        return BoundReport("gr2", params, obs, b, obs <= b)
    worst = None
    for ns, mags in prefix_gammas(spec, 1, N, f):
        keep = ns > k
        if not keep.any():
            continue
        ns, mags = ns[keep], mags[:, keep].max(axis=0)
        bounds = k * (k + 3) / (2 * math.log(k)) * np.log(ns) + k - 1
        i = int(np.argmin(bounds - mags))
        cand = (float(bounds[i] - mags[i]), int(ns[i]), float(mags[i]), float(bounds[i]))
        if worst is None or cand[0] < worst[0]:
            worst = cand
    _, n_at, obs, b = worst
    params["worst_N"] = n_at
    return BoundReport("gr2", params, obs, b, obs <= b)


def crux_check(f: PeriodicF, h: int, N: int) -> BoundReport:
    """|sum_{n<N} e(h f(n) / k)| <= k/2 for a bijective f."""
    if not f.is_permutation():
        raise ValueError("f must permute {0, ..., k-1}")
    k = f.k
    if not 1 <= h < k:
        raise ValueError(f"h must lie in [1, {k - 1}]")
    hist = ResidueHistogram(k, np.bincount(f.over(0, N), minlength=k).astype(np.int64))
    obs = abs(gamma_eval(hist, h))
    return BoundReport("crux", {"k": k, "h": h, "N": N, "f": list(f.values)},
                       obs, k / 2, obs <= k / 2 + 1e-12)


def shift_level(k: int, r: int) -> int:
    """s >= 0 with k^s < r <= k^(s+1); r = 1 falls in the s = 0 range."""
    if r < 1:
        raise ValueError("r must be >= 1")
    s, top = 0, k
    while r > top:
        s += 1
        top *= k
    return s


def mtheo_bound(k: int, r: int, N: int) -> float:
    """(k^2 (k+3) / (2 ln k)) k^s ln(N / k^(s+1)) + k^s (k^3 + k^2) / (k - 1)."""
    s = shift_level(k, r)
    if N <= k ** (s + 1):
        raise ValueError(f"bound for r={r} needs N > {k ** (s + 1)} (minimum N = {k ** (s + 1) + 1})")
    ks = k ** s
    return (k * k * (k + 3) / (2 * math.log(k)) * ks * math.log(N / k ** (s + 1))
            + ks * (k ** 3 + k ** 2) / (k - 1))


def verify_mtheo(spec, r: int, N: int, *, threads: int | None = None,
                 hist: ResidueHistogram | None = None) -> BoundReport:
    """max_h |gamma_N(r)| against the explicit bound, plus the implied delta-sum deviation."""
    _require_prime_grs(spec)
    k = spec.k
    b = mtheo_bound(k, r, N)
    if hist is None:
        hist = residue_histogram(spec, r, N, threads=threads)
    obs = max(abs(gamma_eval(hist, h)) for h in range(1, k))
    delta_sum = N - int(hist.counts[0])
    deviation = abs(delta_sum - (1 - 1 / k) * N)
    extra = {"delta_sum": delta_sum, "deviation": deviation,
             "deviation_bound": (k - 1) / k * b}
    return BoundReport("mtheo", {"k": k, "r": r, "N": N, "s": shift_level(k, r)},
                       obs, b, obs <= b, extra)


def verify_mtheo_range(spec, rs: Sequence[int], N: int) -> list:
    hists = shift_histograms(spec, rs, N)
    return [verify_mtheo(spec, r, N, hist=hists[r]) for r in rs]


def mtheo2_error_shape(r: int, N: int, gamma: float, d: int) -> float:
    """r N^(1-g/d) + r N^(1-g) ln(N^(g/d) / r) + N^g, with the log clamped at 0."""
    log_term = max(math.log(N ** (gamma / d) / r), 0.0)
    return r * N ** (1 - gamma / d) + r * N ** (1 - gamma) * log_term + N ** gamma


def mtheo2_check(spec, r: int, N: int, gamma: float, *, threads: int | None = None) -> BoundReport:
    """Deviation of the delta sum from (1 - 1/k) N, as a ratio to the error shape.

    The implied constant is not explicit, so ``passed`` is None.
    """
    if not isinstance(spec, SquarefreeGRS):
        raise ValueError("mtheo2_check needs a squarefree composition")
    d = len(spec.factors)
    if d < 2:
        raise ValueError("need at least two prime factors; use verify_mtheo for a prime base")
    if r < 1:
        raise ValueError("r must be >= 1")
    if not 0 < gamma < 1:
        raise ValueError("gamma exponent must lie in (0, 1)")
    k = spec.k
    hist = residue_histogram(spec, r, N, threads=threads)
    delta_sum = N - int(hist.counts[0])
    deviation = abs(delta_sum - (1 - 1 / k) * N)
    E = mtheo2_error_shape(r, N, gamma, d)
    return BoundReport("mtheo2", {"k": k, "r": r, "N": N, "gamma": gamma, "d": d},
                       deviation, E, None,
                       {"delta_sum": delta_sum, "mean": delta_sum / N, "ratio": deviation / E})


def random_periodic(k: int, rng: np.random.Generator) -> PeriodicF:
    return PeriodicF(k, tuple(int(v) for v in rng.integers(0, k, size=k)))
