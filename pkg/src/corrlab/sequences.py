"""Generalized Rudin-Shapiro sequences and the baseline sequences they are compared to.

A generalized Rudin-Shapiro (GRS) sequence over k symbols is driven by a
k-periodic table g(j, n) and the recurrence

    a(n*k + j) = a(n) + g(j, n),    0 <= j < k,  n >= 1,

with a(0..k-1) given as initial values.  Unrolling the recurrence gives a
digit-pair sum over the base-k expansion d_L ... d_0 of n:

    a(n) = a(d_L) + sum_{v < L} g(d_v, d_{v+1}).

Everything here is carried modulo k, which is all any consumer needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence, Tuple, Union

import numpy as np

from corrlab.rng import counter_symbols

# target size of the per-block lookup table used by the streaming generator
_BLOCK_TARGET = 1 << 14
_SHORT_WINDOW = 256


class SpecError(ValueError):
    """Raised when a sequence description violates one of its invariants."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class DigitExpansion:
    """Least-significant-first digits of a non-negative integer."""

    base: int
    digits: Tuple[int, ...]

    @property
    def value(self) -> int:
        v = 0
        for d in reversed(self.digits):
            v = v * self.base + d
        return v


def digit_expansion(n: int, base: int) -> DigitExpansion:
    if base < 2:
        raise ValueError("base must be >= 2")
    if n < 0:
        raise ValueError("n must be non-negative")
    digits = []
    while True:
        n, d = divmod(n, base)
        digits.append(d)
        if n == 0:
            break
    return DigitExpansion(base, tuple(digits))


def block_count_oracle(base: int, block: Tuple[int, int], n: int) -> int:
    """Occurrences of the adjacent digit pair ``block`` in n written in ``base``.

    The pair is read most-significant digit first, e.g. (0, 1) in binary
    counts the substring "01".  Deliberately a plain string-style scan.
    """
    hi, lo = block
    if not (0 <= hi < base and 0 <= lo < base):
        raise ValueError("block digits must lie in [0, base)")
    msd_first = list(reversed(digit_expansion(n, base).digits))
    return sum(1 for x, y in zip(msd_first, msd_first[1:]) if (x, y) == (hi, lo))


@dataclass(frozen=True)
class GTable:
    """The k-periodic function g(j, n), stored as values[j][n mod k] reduced mod k."""

    k: int
    values: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 2:
            raise SpecError(f"alphabet size must be >= 2, got {self.k}")
        if len(self.values) != self.k or any(len(row) != self.k for row in self.values):
            raise SpecError(f"g table must be {self.k}x{self.k}")
        if any(not 0 <= v < self.k for row in self.values for v in row):
            raise SpecError("g table entries must be reduced mod k")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], k: int | None = None) -> "GTable":
        k = len(rows) if k is None else k
        if len(rows) != k or any(len(row) != k for row in rows):
            raise SpecError(f"g table must be {k}x{k}")
        return cls(k, tuple(tuple(int(v) % k for v in row) for row in rows))

    @classmethod
    def from_function(cls, k: int, fn: Callable[[int, int], int]) -> "GTable":
        return cls.from_rows([[fn(j, n) for n in range(k)] for j in range(k)], k)

    @classmethod
    def standard(cls, k: int) -> "GTable":
        """g(j, n) = j * (n mod k); admissible exactly when k is prime."""
        return cls.from_function(k, lambda j, n: j * n)

    def __call__(self, j: int, n: int) -> int:
        return self.values[j][n % self.k]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)

    def to_rows(self) -> list:
        return [list(row) for row in self.values]


def admissibility_violation(g: GTable) -> Tuple[int, int] | None:
    """First (u, i) whose column differences miss a residue, or None if admissible."""
    k = g.k
    full = set(range(k))
    for u in range(k):
        for i in range(1, k - u):
            diffs = {(g(u + i, n) - g(u, n)) % k for n in range(k)}
            if diffs != full:
                return (u, i)
    return None


def validate_admissible(g: GTable) -> bool:
    return admissibility_violation(g) is None


class _DigitPairEngine:
    """Evaluates a(n) = init[d_L] + sum g(d_v, d_{v+1}) (mod ``modulus``) in base ``base``.

    Streaming windows use a block table: for n = q*B + t with B = base**L and
    q >= 1, a(n) = a(q) + T[q mod base][t], where T[c][t] is the pair sum of
    the L low digits of t with c sitting above them.  Each symbol then costs
    one table lookup plus one add.
    """

    def __init__(self, base: int, table: np.ndarray, init: np.ndarray, modulus: int):
        self.base = base
        self.modulus = modulus
        self.table = np.asarray(table, dtype=np.int64) % modulus
        self.init = np.asarray(init, dtype=np.int64) % modulus

    @cached_property
    def levels(self) -> int:
        L = 1
        while self.base ** (L + 1) <= _BLOCK_TARGET:
            L += 1
        return L

    @property
    def block(self) -> int:
        return self.base ** self.levels

    @cached_property
    def block_table(self) -> np.ndarray:
        base, B = self.base, self.block
        L = self.levels
        t = np.arange(B, dtype=np.int64)
        digits = [(t // base ** v) % base for v in range(L)]
        out = np.zeros((base, B), dtype=np.int64)
        for c in range(base):
            acc = np.zeros(B, dtype=np.int64)
            for v in range(L - 1):
                acc += self.table[digits[v], digits[v + 1]]
            acc += self.table[digits[L - 1], c]
            out[c] = acc % self.modulus
        return out

    @cached_property
    def head(self) -> np.ndarray:
        return self.many(np.arange(self.block, dtype=np.int64))

    def scalar(self, n: int) -> int:
        if n < 0:
            raise ValueError("index must be non-negative")
        acc = 0
        b = self.base
        while n >= b:
            q, j = divmod(n, b)
            acc += int(self.table[j, q % b])
            n = q
        return (acc + int(self.init[n])) % self.modulus

    def many(self, ns: np.ndarray) -> np.ndarray:
        cur = np.array(ns, dtype=np.int64)
        acc = np.zeros(cur.shape, dtype=np.int64)
        b = self.base
        mask = cur >= b
        while mask.any():
            q, j = np.divmod(cur[mask], b)
            acc[mask] += self.table[j, q % b]
            cur[mask] = q
            mask = cur >= b
        return (acc + self.init[cur]) % self.modulus

    def window(self, lo: int, hi: int) -> np.ndarray:
        if hi <= lo:
            return np.empty(0, dtype=np.int64)
        if hi - lo <= _SHORT_WINDOW:
            # short reads skip the block table entirely
            return self.many(np.arange(lo, hi, dtype=np.int64))
        B = self.block
        q0, q1 = lo // B, (hi - 1) // B
        qs = np.arange(max(q0, 1), q1 + 1, dtype=np.int64)
        rows = []
        if q0 == 0:
            rows.append(self.head[None, :])
        if qs.size:
            aq = self.many(qs)
            rows.append((aq[:, None] + self.block_table[qs % self.base]) % self.modulus)
        flat = np.concatenate(rows, axis=0).ravel()
        start = lo - q0 * B
        return flat[start:start + (hi - lo)]


@dataclass(frozen=True)
class PrimeGRS:
    k: int
    g: GTable
    init: Tuple[int, ...] = None

    kind = "prime-grs"

    def __post_init__(self):
        if not is_prime(self.k):
            raise SpecError(f"k is not prime (k={self.k})")
        if self.g.k != self.k:
            raise SpecError("g table size does not match k")
        init = tuple([0] * self.k) if self.init is None else tuple(int(v) for v in self.init)
        _check_init(init, self.k)
        object.__setattr__(self, "init", init)
        bad = admissibility_violation(self.g)
        if bad is not None:
            raise SpecError(f"g is not admissible: (u, i) = {bad} misses a residue mod {self.k}")

    @cached_property
    def _engine(self) -> _DigitPairEngine:
        return _DigitPairEngine(self.k, self.g.as_array(), np.array(self.init), self.k)

    def symbol(self, n: int) -> int:
        return self._engine.scalar(n)

    def window(self, lo: int, hi: int) -> np.ndarray:
        return self._engine.window(lo, hi)

    def to_dict(self) -> dict:
        return {"type": self.kind, "k": self.k, "g": self.g.to_rows(), "init": list(self.init)}


@dataclass(frozen=True)
class Factor:
    """One prime-base component of a squarefree composition."""

    p: int
    g: GTable
    init: Tuple[int, ...] = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise SpecError(f"factor {self.p} is not prime (k would not be squarefree)")
        if self.g.k != self.p:
            raise SpecError(f"g table for factor {self.p} must be {self.p}x{self.p}")
        init = tuple([0] * self.p) if self.init is None else tuple(int(v) for v in self.init)
        _check_init(init, self.p)
        object.__setattr__(self, "init", init)
        bad = admissibility_violation(self.g)
        if bad is not None:
            raise SpecError(f"g for factor {self.p} is not admissible: (u, i) = {bad}")


@dataclass(frozen=True)
class SquarefreeGRS:
    """a(n) = sum_i c_i a_i(n) mod k, with a_i a GRS recurrence in base p_i and c_i = p_1...p_{i-1}."""

    factors: Tuple[Factor, ...]

    kind = "squarefree-grs"

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise SpecError("squarefree spec needs at least one factor")
        primes = [f.p for f in factors]
        if len(set(primes)) != len(primes):
            raise SpecError(f"factor primes must be pairwise distinct, got {primes}")
        object.__setattr__(self, "factors", factors)

    @property
    def k(self) -> int:
        return int(np.prod([f.p for f in self.factors]))

    @property
    def weights(self) -> Tuple[int, ...]:
        out, c = [], 1
        for f in self.factors:
            out.append(c)
            c *= f.p
        return tuple(out)

    @cached_property
    def _engines(self):
        k = self.k
        return [_DigitPairEngine(f.p, f.g.as_array(), np.array(f.init), k) for f in self.factors]

    def symbol(self, n: int) -> int:
        return sum(c * e.scalar(n) for c, e in zip(self.weights, self._engines)) % self.k

    def window(self, lo: int, hi: int) -> np.ndarray:
        acc = np.zeros(max(hi - lo, 0), dtype=np.int64)
        for c, e in zip(self.weights, self._engines):
            acc += c * e.window(lo, hi)
        return acc % self.k

    def to_dict(self) -> dict:
        return {"type": self.kind,
                "factors": [{"p": f.p, "g": f.g.to_rows(), "init": list(f.init)} for f in self.factors]}


@dataclass(frozen=True)
class ThueMorse:
    """Digit sum of n in base k, mod k.  Contrast sequence only."""

    k: int

    kind = "thue-morse"

    def __post_init__(self):
        if self.k < 2:
            raise SpecError("k must be >= 2")

    @cached_property
    def _engine(self) -> _DigitPairEngine:
        j = np.arange(self.k, dtype=np.int64)
        return _DigitPairEngine(self.k, np.repeat(j[:, None], self.k, axis=1), j, self.k)

    def symbol(self, n: int) -> int:
        return self._engine.scalar(n)

    def window(self, lo: int, hi: int) -> np.ndarray:
        return self._engine.window(lo, hi)

    def to_dict(self) -> dict:
        return {"type": self.kind, "k": self.k}


@dataclass(frozen=True)
class IidRandom:
    k: int
    seed: int = 0

    kind = "iid"

    def __post_init__(self):
        if self.k < 2:
            raise SpecError("k must be >= 2")

    def symbol(self, n: int) -> int:
        return int(counter_symbols(self.k, self.seed, n, n + 1)[0])

    def window(self, lo: int, hi: int) -> np.ndarray:
        return counter_symbols(self.k, self.seed, lo, hi)

    def to_dict(self) -> dict:
        return {"type": self.kind, "k": self.k, "seed": self.seed}


SequenceSpec = Union[PrimeGRS, SquarefreeGRS, ThueMorse, IidRandom]


@dataclass(frozen=True)
class Word:
    """A literal finite word, usable wherever a sequence spec is accepted."""

    symbols: np.ndarray = field(repr=False)
    k: int

    kind = "word"

    def __post_init__(self):
        arr = np.asarray(self.symbols, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("word must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.k):
            raise ValueError(f"word symbols must lie in [0, {self.k})")
        object.__setattr__(self, "symbols", arr)

    def __len__(self) -> int:
        return int(self.symbols.size)

    def symbol(self, n: int) -> int:
        return int(self.symbols[n])

    def window(self, lo: int, hi: int) -> np.ndarray:
        if lo < 0 or hi > self.symbols.size:
            raise IndexError(f"window [{lo}, {hi}) outside word of length {self.symbols.size}")
        return self.symbols[lo:hi]


def as_source(x: Any, k: int | None = None):
    """Accept a sequence spec, a Word, or any integer array (wrapped as a Word)."""
    if hasattr(x, "window") and hasattr(x, "k"):
        return x
    arr = np.asarray(x, dtype=np.int64)
    if k is None:
        k = max(int(arr.max()) + 1 if arr.size else 2, 2)
    return Word(arr, k)


def eval_a(spec, n: int) -> int:
    """The symbol at index n, in O(log n) without generating a prefix."""
    return spec.symbol(n)


def generate_prefix(spec, N: int) -> np.ndarray:
    if N < 0:
        raise ValueError("N must be non-negative")
    return spec.window(0, N)


def _check_init(init: Sequence[int], k: int) -> None:
    if len(init) != k:
        raise SpecError(f"init must have exactly {k} entries")
    if any(not 0 <= v < k for v in init):
        raise SpecError(f"init entries must lie in [0, {k})")


def spec_from_dict(data: dict) -> SequenceSpec:
    try:
        kind = data["type"]
    except (KeyError, TypeError):
        raise SpecError("spec needs a 'type' field") from None
    try:
        if kind == "prime-grs":
            k = int(data["k"])
            if not is_prime(k):
                raise SpecError(f"k is not prime (k={k})")
            return PrimeGRS(k, GTable.from_rows(data["g"], k), data.get("init"))
        if kind == "squarefree-grs":
            factors = []
            for item in data["factors"]:
                p = int(item["p"])
                if not is_prime(p):
                    raise SpecError(f"factor {p} is not prime (k is not squarefree)")
                factors.append(Factor(p, GTable.from_rows(item["g"], p), item.get("init")))
            return SquarefreeGRS(tuple(factors))
        if kind == "thue-morse":
            return ThueMorse(int(data["k"]))
        if kind == "iid":
            return IidRandom(int(data["k"]), int(data.get("seed", 0)))
    except KeyError as exc:
        raise SpecError(f"spec of type {kind!r} is missing field {exc}") from None
    raise SpecError(f"unknown spec type {kind!r}")


def load_spec(path: Union[str, Path]) -> SequenceSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not valid JSON ({exc})") from None
    return spec_from_dict(data)


def spec_id(spec) -> str:
    if isinstance(spec, SquarefreeGRS):
        return "squarefree-grs-" + "x".join(str(f.p) for f in spec.factors)
    return f"{spec.kind}-k{spec.k}"


# Stock sequences, all with zero initial values.

def rudin_shapiro() -> PrimeGRS:
    """Binary Rudin-Shapiro: parity of the number of "11" blocks."""
    return PrimeGRS(2, GTable.standard(2))


def block01_sequence() -> PrimeGRS:
    """Binary sequence counting "01" blocks mod 2."""
    return PrimeGRS(2, GTable.from_rows([[0, 0], [1, 0]]))


def ternary_diagonal() -> PrimeGRS:
    """k = 3 with g(j, n) = [j == n mod 3]: counts 00, 11, 22 blocks mod 3."""
    return PrimeGRS(3, GTable.from_function(3, lambda j, n: int(j == n % 3)))


def standard_squarefree(primes: Iterable[int]) -> SquarefreeGRS:
    return SquarefreeGRS(tuple(Factor(p, GTable.standard(p)) for p in primes))
