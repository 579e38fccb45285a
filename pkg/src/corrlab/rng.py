"""Counter-based random symbols: value at position n depends only on (seed, stream, n)."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def counter_symbols(k: int, seed: int, lo: int, hi: int, stream: int = 0) -> np.ndarray:
    """Symbols in {0..k-1} for positions [lo, hi) of the (seed, stream) stream.

    Philox 4x64 emits four words per counter value, so position n lives in
    counter n // 4, lane n % 4.  Any window can be produced without touching
    the positions before it.
    """
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    start = lo // 4
    gen = np.random.Philox(key=key, counter=np.array([start, 0, 0, 0], dtype=np.uint64))
    skip = lo - 4 * start
    raw = gen.random_raw(hi - lo + skip)[skip:]
    return (raw % np.uint64(k)).astype(np.int64)
