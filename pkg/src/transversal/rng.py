"""SplitMix64 pseudo-random generator and seeded instance generators.

The generator is specified bit-exactly so that other implementations can
reproduce every instance.  All arithmetic is modulo 2**64::

    state  <- state + 0x9E3779B97F4A7C15
    z      <- state
    z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
    z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB
    output <- z XOR (z >> 31)

Derived seeds: ``derive_seed(seed, i)`` is the ``(i+1)``-th output of the
stream started from ``seed``, computed directly without stepping.

Tournament generation draws one 64-bit word per pair ``u < v`` in
lexicographic order (``(0,1), (0,2), ..., (0,n-1), (1,2), ...``).  In the
uniform model the arc is ``u -> v`` iff the top bit of the word is 1.  In the
biased model it is ``u -> v`` iff ``word < floor(p * 2**64)``.  The members of a
collection are generated one after another from the same stream, color 0
first.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import ParameterError, Tournament, TournamentCollection, as_fraction

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    return _mix((seed + (index + 1) * GOLDEN) & MASK64)


class SplitMix64:
    """The SplitMix64 stream described in the module docstring."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix(self.state)

    def next_array(self, count: int) -> np.ndarray:
        """The next ``count`` outputs as a ``uint64`` array (same values as a loop)."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GOLDEN) & MASK64
        return z

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection sampling."""
        if bound <= 0:
            raise ParameterError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def shuffle(self, items: list) -> list:
        """Fisher-Yates shuffle in place (from the back), returned for chaining."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, items, k: int) -> list:
        pool = list(items)
        if k > len(pool):
            raise ParameterError("sample larger than population")
        return self.shuffle(pool)[len(pool) - k:]


def _from_upper(n: int, forward: np.ndarray) -> Tournament:
    a = np.zeros((n, n), dtype=bool)
    iu, ju = np.triu_indices(n, 1)
    a[iu, ju] = forward
    a[ju, iu] = ~forward
    return Tournament.from_matrix(a)


def random_tournament(rng: SplitMix64, n: int, bias=None) -> Tournament:
    """Tournament with independently drawn pair orientations.

    ``bias`` is the probability of ``u -> v`` for ``u < v``; ``None`` is the
    fair coin taken from the top bit.
    """
    if n < 1:
        raise ParameterError("n must be positive")
    words = rng.next_array(n * (n - 1) // 2)
    if bias is None:
        forward = (words >> np.uint64(63)).astype(bool)
    else:
        p = as_fraction(bias)
        if not (0 <= p <= 1):
            raise ParameterError("bias must lie in [0, 1]")
        threshold = (p.numerator << 64) // p.denominator
        if threshold >= 1 << 64:
            forward = np.ones(words.shape, dtype=bool)
        else:
            forward = words < np.uint64(threshold)
    return _from_upper(n, forward)


MODELS = ("uniform", "transitive", "qr", "custom-bias")


def generate_collection(n: int, m: int, seed: int = 0, model: str = "uniform",
                        bias=Fraction(3, 4)) -> TournamentCollection:
    """Seeded collection of ``m`` tournaments on ``n`` vertices."""
    if n < 1 or m < 1:
        raise ParameterError("n and m must be positive")
    if model == "uniform":
        rng = SplitMix64(seed)
        return TournamentCollection([random_tournament(rng, n) for _ in range(m)])
    if model == "custom-bias":
        rng = SplitMix64(seed)
        return TournamentCollection([random_tournament(rng, n, bias) for _ in range(m)])
    if model == "transitive":
        return TournamentCollection.replicate(Tournament.transitive(n), m)
    if model == "qr":
        return TournamentCollection.replicate(Tournament.quadratic_residue(n), m)
    raise ParameterError(f"unknown model {model!r}")


def all_tournaments(n: int):
    """Yield every labeled tournament on ``n`` vertices.

    Tournament number ``k`` orients pair number ``p`` (lexicographic order of
    pairs ``u < v``) as ``u -> v`` iff bit ``p`` of ``k`` is 1.
    """
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for code in range(1 << len(pairs)):
        out = [0] * n
        for p, (u, v) in enumerate(pairs):
            if (code >> p) & 1:
                out[u] |= 1 << v
            else:
                out[v] |= 1 << u
        yield Tournament(out)
