"""Primitive words, roots, rotation classes and necklace enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import TYPE_CHECKING, Iterator, Sequence

from .errors import CapExceeded, NonPrimitive, ParseError

if TYPE_CHECKING:
    from .dist import DiscreteDist

Word = tuple[int, ...]

ENUMERATION_CAP = 2**22


def smallest_period(w: Sequence[int]) -> int:
    """Smallest p >= 1 with w[i] = w[i+p] for all valid i (KMP border scan)."""
    k = len(w)
    if k == 0:
        raise ValueError("empty word")
    border = [0] * k
    b = 0
    for i in range(1, k):
        while b and w[i] != w[b]:
            b = border[b - 1]
        if w[i] == w[b]:
            b += 1
        border[i] = b
    return k - border[-1]


def root(w: Sequence[int]) -> tuple[Word, int]:
    """Return ``(r, m)`` with ``r`` primitive and ``w == r * m``."""
    w = tuple(w)
    p = smallest_period(w)
    if len(w) % p:
        return w, 1
    return w[:p], len(w) // p


def is_primitive(w: Sequence[int]) -> bool:
    return root(w)[1] == 1


def rotate(w: Sequence[int], s: int) -> Word:
    """The conjugate of ``w`` starting at index ``s``."""
    w = tuple(w)
    s %= len(w)
    return w[s:] + w[:s]


def reverse(w: Sequence[int]) -> Word:
    return tuple(reversed(w))


def least_rotation_index(w: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = list(w) * 2
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def canonical_rotation(w: Sequence[int]) -> Word:
    return rotate(w, least_rotation_index(w))


@dataclass(frozen=True, order=True)
class Necklace:
    """Rotation class of a primitive word, stored as its least rotation."""

    word: Word

    def __post_init__(self):
        if not self.word:
            raise ValueError("empty word")
        if canonical_rotation(self.word) != self.word:
            raise ValueError(f"{self.word} is not a least rotation; use necklace_of")
        if not is_primitive(self.word):
            raise NonPrimitive(f"{format_word(self.word)} is a power")

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return format_word(self.word)


def necklace_of(w: Sequence[int]) -> Necklace:
    if not is_primitive(w):
        raise NonPrimitive(f"{format_word(w)} is a nontrivial power")
    return Necklace(canonical_rotation(w))


def _check_cap(q: int, k: int, cap: int) -> None:
    if q < 1 or k < 1:
        raise ValueError("need q >= 1 and k >= 1")
    if q**k > cap:
        raise CapExceeded(f"{q}^{k} words exceeds cap {cap}")


def enumerate_primitive(q: int, k: int, cap: int = ENUMERATION_CAP) -> Iterator[Word]:
    _check_cap(q, k, cap)
    for w in product(range(q), repeat=k):
        if is_primitive(w):
            yield w


def enumerate_necklaces(q: int, k: int, cap: int = ENUMERATION_CAP) -> Iterator[Necklace]:
    """Aperiodic necklaces of length ``k`` over {0..q-1}, in lexicographic order.

    Generates Lyndon words (least rotations of primitive words) with Duval's
    successor rule.
    """
    _check_cap(q, k, cap)
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m == k:
            yield Necklace(tuple(w))
        while len(w) < k:
            w.append(w[-m])
        while w and w[-1] == q - 1:
            w.pop()


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for n >= 1")
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def necklace_count(q: int, k: int) -> int:
    """Number of aperiodic necklaces: (1/k) * sum_{d | k} mu(d) q^(k/d)."""
    total = sum(mobius(d) * q ** (k // d) for d in divisors(k))
    assert total % k == 0
    return total // k


def primitive_mass(dist: "DiscreteDist", k: int, l: int = 1, mode: str = "mobius",
                   cap: int = ENUMERATION_CAP):
    """Sum over primitive words w of length k of p_w ** l.

    ``mode="mobius"`` uses sum_{d | k} mu(d) (sum_i p_i^(d l))^(k/d) and works
    for any distribution; ``mode="brute"`` enumerates Q_k (finite support only).
    """
    if k < 1 or l < 1:
        raise ValueError("need k >= 1 and l >= 1")
    if mode == "mobius":
        return sum(mobius(d) * dist.power_sum(d * l) ** (k // d) for d in divisors(k))
    if mode == "brute":
        probs = dist.finite_probs()
        total = Fraction(0) if dist.exact else 0.0
        for w in enumerate_primitive(len(probs), k, cap):
            total += word_probability(probs, w) ** l
        return total
    raise ValueError(f"unknown mode {mode!r}")


def word_probability(probs: Sequence, w: Sequence[int]):
    p = 1
    for letter in w:
        p *= probs[letter]
    return p


def format_word(w: Sequence[int]) -> str:
    return ",".join(map(str, w))


def parse_word(text: str) -> Word:
    try:
        w = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok != "")
    except ValueError as exc:
        raise ParseError(f"bad word: {text!r}") from exc
    if not w or any(v < 0 for v in w):
        raise ParseError(f"bad word: {text!r}")
    return w
