"""Random generation for the standardized permutation model and its special cases.

Every sampler draws from an :class:`RngStream`. Uniforms are built directly
from the raw 64-bit output of numpy's PCG64 (seeded through ``SeedSequence``
with the stream id as spawn key), so results depend only on the bit
generator, whose output numpy keeps stable across releases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Permutation, standardize
from .dist import DiscreteDist

RNG_ALGORITHM = "pcg64-seedsequence-raw53/v1"
DEFAULT_SEED = 20250101
PD_TOL = 1e-12


class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    def __init__(self, seed: int = DEFAULT_SEED, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._bits = np.random.PCG64(ss)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def spawn(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def raw(self, size) -> np.ndarray:
        n = int(np.prod(size))
        return self._bits.random_raw(n).reshape(size)

    def uniform(self, size) -> np.ndarray:
        """Uniforms on [0, 1) with 53 random bits."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)

    def below(self, m, size) -> np.ndarray:
        """Integers uniform on {0..m-1}; ``m`` may broadcast against ``size``."""
        return np.minimum((self.uniform(size) * m).astype(np.int64), np.asarray(m) - 1)


@dataclass(frozen=True)
class SimplexVector:
    entries: tuple[float, ...]
    remainder: float


def geometric_cap(q: float) -> int:
    return 64 * math.ceil(1.0 / -math.log2(q))


def sample_sequences(dist: DiscreteDist, n: int, reps: int, rng: RngStream) -> np.ndarray:
    """``reps`` independent i.i.d. sequences of length ``n`` as an int array."""
    shape = (reps, n)
    if dist.kind == "finite":
        probs = np.array([float(p) for p in dist.probs])
        q = len(probs)
        dtype = np.int16 if q < 2**15 else np.int64
        if len(set(dist.probs)) == 1:
            return rng.below(q, shape).astype(dtype)
        cum = np.cumsum(probs)
        out = np.searchsorted(cum, rng.uniform(shape), side="right")
        return np.minimum(out, q - 1).astype(dtype)
    q = float(dist.q)
    logq = math.log(q)
    cap = geometric_cap(q)
    out = np.floor(np.log1p(-rng.uniform(shape)) / logq).astype(np.int64)
    bad = out >= cap
    while bad.any():
        out[bad] = np.floor(np.log1p(-rng.uniform(int(bad.sum()))) / logq).astype(np.int64)
        bad = out >= cap
    return out


def sample_sequence(dist: DiscreteDist, n: int, rng: RngStream) -> tuple[int, ...]:
    if n == 0:
        return ()
    return tuple(int(v) for v in sample_sequences(dist, n, 1, rng)[0])


def standardize_rows(g: np.ndarray) -> np.ndarray:
    """Row-wise standardization, returned 0-based: out[r, j] = sigma_r(j+1) - 1."""
    reps, n = g.shape
    order = np.argsort(g, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(n), (reps, n)), axis=1)
    return ranks


def sample_std_perm(dist: DiscreteDist, n: int, rng: RngStream) -> tuple[tuple[int, ...], Permutation]:
    g = sample_sequence(dist, n, rng)
    return g, standardize(g)


def random_keys(reps: int, n: int, rng: RngStream) -> np.ndarray:
    """Distinct 64-bit keys per row; rows with a collision are redrawn."""
    keys = rng.raw((reps, n))
    while True:
        s = np.sort(keys, axis=1)
        dup = (s[:, 1:] == s[:, :-1]).any(axis=1) if n > 1 else np.zeros(reps, bool)
        if not dup.any():
            return keys
        keys[dup] = rng.raw((int(dup.sum()), n))


def sample_atomless_perms(reps: int, n: int, rng: RngStream) -> np.ndarray:
    """std of atomless (distinct-key) sequences, 0-based rows."""
    return standardize_rows(random_keys(reps, n, rng))


def fisher_yates_rows(reps: int, n: int, rng: RngStream) -> np.ndarray:
    """Uniform permutations by Fisher-Yates, vectorized across rows (0-based)."""
    perm = np.tile(np.arange(n, dtype=np.int64), (reps, 1))
    rows = np.arange(reps)
    # one row-major block of uniforms, so each row uses its own contiguous draws
    u = rng.uniform((reps, max(n - 1, 0)))
    for i in range(n - 1, 0, -1):
        j = np.minimum((u[:, n - 1 - i] * (i + 1)).astype(np.int64), i)
        tmp = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = tmp
    return perm


def sample_uniform_perm(n: int, rng: RngStream) -> Permutation:
    return Permutation(tuple(int(v) + 1 for v in fisher_yates_rows(1, n, rng)[0]))


def sample_riffle_oracle(q: int, n: int, rng: RngStream) -> Permutation:
    """Forward q-riffle shuffle of the deck 1..n, read top to bottom.

    Cut into q packets with multinomial sizes, then repeatedly drop the next
    card from a packet chosen with probability proportional to its size.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    sizes = np.bincount(rng.below(q, n), minlength=q) if n else np.zeros(q, int)
    packets = []
    start = 1
    for s in sizes:
        packets.append(list(range(start, start + int(s))))
        start += int(s)
    remaining = [len(p) for p in packets]
    heads = [0] * q
    deck = []
    for left in range(n, 0, -1):
        u = int(rng.below(left, 1)[0])
        j = 0
        while u >= remaining[j]:
            u -= remaining[j]
            j += 1
        deck.append(packets[j][heads[j]])
        heads[j] += 1
        remaining[j] -= 1
    return Permutation(tuple(deck))


def rising_sequences(sigma: Permutation) -> int:
    """Number of maximal runs v, v+1, ... appearing left to right in the one-line form."""
    pos = sigma.inverse()
    return 1 + sum(1 for v in range(1, len(sigma)) if pos(v + 1) < pos(v))


def sample_major_biased(q: float, n: int, rng: RngStream) -> Permutation:
    """std(-G)^(-1) with G i.i.d. geometric, P(G = k) = (1 - q) q^k."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    g = sample_sequence(DiscreteDist.geometric(float(q)), n, rng)
    top = max(g, default=0)
    return standardize([top - v for v in g]).inverse()


def sample_pd_rows(size: int, rng: RngStream, tol: float = PD_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Stick-breaking for ``size`` samples; rows sorted decreasing, zero-padded."""
    pieces = []
    rem = np.ones(size)
    while (rem >= tol).any():
        u = rng.uniform(size)
        active = rem >= tol
        piece = np.where(active, rem * u, 0.0)
        rem = np.where(active, rem * (1 - u), rem)
        pieces.append(piece)
    y = np.stack(pieces, axis=1) if pieces else np.zeros((size, 0))
    return -np.sort(-y, axis=1), rem


def sample_pd(rng: RngStream, tol: float = PD_TOL) -> SimplexVector:
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    y, rem = sample_pd_rows(1, rng, tol)
    entries = tuple(float(v) for v in y[0] if v > 0)
    return SimplexVector(entries, float(rem[0]))


def m_t(v: SimplexVector | Sequence[float], t: int) -> tuple[float, float]:
    """sum_j x_j^t and an upper bound on what the unlisted mass can add."""
    if t < 2:
        raise ValueError("t must be >= 2")
    if isinstance(v, SimplexVector):
        return math.fsum(x**t for x in v.entries), v.remainder**t
    return math.fsum(x**t for x in v), 0.0
