"""Discrete correlation of order m along shift vectors, running and windowed."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from corrlab.parallel import DEFAULT_CHUNK, chunk_ranges, map_chunks
from corrlab.sequences import as_source, spec_id as describe


@dataclass(frozen=True)
class ShiftVector:
    offsets: Tuple[int, ...]

    def __post_init__(self):
        offs = tuple(int(r) for r in self.offsets)
        if len(offs) < 2:
            raise ValueError("a shift vector needs at least two offsets")
        if offs[0] < 0:
            raise ValueError("offsets must be non-negative")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError(f"offsets must be strictly increasing, got {offs}")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def parse(cls, text: str) -> "ShiftVector":
        return cls(tuple(int(t) for t in text.split(",") if t.strip()))

    @property
    def m(self) -> int:
        return len(self.offsets)

    @property
    def span(self) -> int:
        return self.offsets[-1]

    def shifted(self, t: int) -> "ShiftVector":
        return ShiftVector(tuple(r + t for r in self.offsets))


def _as_shift(r) -> ShiftVector:
    return r if isinstance(r, ShiftVector) else ShiftVector(tuple(r))


def normalize_shift(r) -> Tuple[ShiftVector, int]:
    """Return (r - r_1, r_1); C_r is unchanged by a constant shift."""
    r = _as_shift(r)
    base = r.offsets[0]
    return r.shifted(-base), base


def delta(word: Sequence[int], indices: Sequence[int]) -> int:
    """0 if the word carries the same symbol at every index, else 1."""
    n = len(word)
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"index {i} outside word of length {n}")
    first = word[indices[0]]
    return int(any(word[i] != first for i in indices[1:]))


def delta_array(x: np.ndarray, offsets: Sequence[int], count: int) -> np.ndarray:
    """delta(n + r_1, ..., n + r_m) for n in [0, count) over the array x."""
    base = x[offsets[0]:offsets[0] + count]
    out = np.zeros(count, dtype=bool)
    for r in offsets[1:]:
        out |= x[r:r + count] != base
    return out


def _delta_sum(src, offsets, lo, hi) -> int:
    x = src.window(lo, hi + offsets[-1])
    return int(np.count_nonzero(delta_array(x, offsets, hi - lo)))


@dataclass
class CorrelationReport:
    spec_id: str
    shift: ShiftVector
    N: int
    k: int
    delta_sum: int
    checkpoints: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.delta_sum, self.N)

    @property
    def target(self) -> Fraction:
        return 1 - Fraction(1, self.k ** (self.shift.m - 1))

    def to_dict(self) -> dict:
        return {
            "spec_id": self.spec_id,
            "m": self.shift.m,
            "r": list(self.shift.offsets),
            "N": self.N,
            "delta_sum": self.delta_sum,
            "mean": float(self.mean),
            "target": float(self.target),
            "checkpoints": [{"N": n, "delta_sum": s, "mean": s / n} for n, s in self.checkpoints],
        }


def checkpoint_positions(N: int) -> List[int]:
    """N_t = ceil(N / 2^t) for t = 0, 1, ... down to 1, ascending."""
    pts, t = set(), 0
    while True:
        n = -(-N // (1 << t))
        pts.add(n)
        if n == 1:
            break
        t += 1
    return sorted(pts)


def corr_sum(source, r, N: int, *, k: int | None = None, spec_id: str | None = None,
             threads: int | None = None, chunk: int = DEFAULT_CHUNK) -> CorrelationReport:
    """Sum of delta(n + r_1, ..., n + r_m) over n < N, with geometric checkpoints."""
    if N < 1:
        raise ValueError("N must be >= 1")
    src = as_source(source, k)
    r = _as_shift(r)
    cps = checkpoint_positions(N)
    ranges = chunk_ranges(0, N, chunk, cuts=cps)
    sums = map_chunks(lambda lo, hi: _delta_sum(src, r.offsets, lo, hi), ranges, threads)
    total, checkpoints = 0, []
    wanted = set(cps)
    for (_, hi), s in zip(ranges, sums):
        total += s
        if hi in wanted:
            checkpoints.append((hi, total))
    if spec_id is None:
        spec_id = describe(src)
    return CorrelationReport(spec_id, r, N, src.k, total, checkpoints)


def window_sums(source, r, d: int, N: int, *, k: int | None = None) -> np.ndarray:
    """Integer sums of delta over every length-d window inside scan positions [0, N)."""
    if d < 1:
        raise ValueError("window length d must be >= 1")
    if d > N:
        raise ValueError(f"window length d={d} exceeds scan length N={N}")
    src = as_source(source, k)
    r = _as_shift(r)
    x = src.window(0, N + r.span)
    cs = np.concatenate(([0], np.cumsum(delta_array(x, r.offsets, N), dtype=np.int64)))
    return cs[d:] - cs[:-d]


def d_window_min(source, r, d: int, N: int, *, k: int | None = None,
                 threads: int | None = None, chunk: int = DEFAULT_CHUNK) -> Fraction:
    """Smallest windowed mean of delta over windows starting at 0..N-d.

    Window starts are split into chunks; each chunk reads d - 1 extra
    positions so no window straddles a boundary unseen.
    """
    if d < 1:
        raise ValueError("window length d must be >= 1")
    if d > N:
        raise ValueError(f"window length d={d} exceeds scan length N={N}")
    src = as_source(source, k)
    r = _as_shift(r)

    def chunk_min(lo: int, hi: int) -> int:
        x = src.window(lo, hi + d - 1 + r.span)
        flags = delta_array(x, r.offsets, hi - lo + d - 1)
        cs = np.concatenate(([0], np.cumsum(flags, dtype=np.int64)))
        return int((cs[d:] - cs[:-d]).min())

    starts = chunk_ranges(0, N - d + 1, chunk)
    return Fraction(min(map_chunks(chunk_min, starts, threads)), d)


def theorem2_finite_check(word, r, d: int, *, k: int | None = None) -> bool:
    """min over disjoint length-d blocks of the block mean <= mean over those blocks."""
    src = as_source(word, k)
    r = _as_shift(r)
    a = (len(src) - r.span) // d
    if a < 1:
        raise ValueError("word too short for a single block")
    x = src.window(0, len(src))
    blocks = delta_array(x, r.offsets, a * d).reshape(a, d).sum(axis=1)
    return int(blocks.min()) * a <= int(blocks.sum())
