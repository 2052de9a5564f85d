"""Exact laws of typed cycle counts and related closed-form moments.

With a rational :class:`~stdperm.dist.DiscreteDist` every function here returns
a :class:`fractions.Fraction`; with float parameters it returns floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Mapping, Sequence

from .cumulants import enumerate_partitions, stirling2
from .dist import DiscreteDist
from .errors import CapExceeded
from .words import ENUMERATION_CAP, Necklace, enumerate_necklaces, primitive_mass

PD_MOMENT_CAP = 8


@dataclass(frozen=True)
class TypedTailQuery:
    """The event {D_w >= l for every (w, l) in pairs} for sequences of length n."""

    pairs: tuple[tuple[Necklace, int], ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((w, int(l)) for w, l in self.pairs))
        necklaces = [w for w, _ in self.pairs]
        if len(set(necklaces)) != len(necklaces):
            raise ValueError("query necklaces must be pairwise distinct")
        if any(l < 0 for _, l in self.pairs):
            raise ValueError("thresholds must be >= 0")


def _one(dist: DiscreteDist):
    return Fraction(1) if dist.exact else 1.0


def joint_tail(dist: DiscreteDist, query: TypedTailQuery):
    """P(D_{w_1} >= l_1, ..., D_{w_r} >= l_r) = prod p_w^l when sum |w| l <= n, else 0."""
    if sum(len(w) * l for w, l in query.pairs) > query.n:
        return 0 * _one(dist)
    result = _one(dist)
    for w, l in query.pairs:
        result *= dist.word_prob(w.word) ** l
    return result


def marginal_pmf_D(dist: DiscreteDist, necklace: Necklace, n: int) -> list:
    """Law of D_w: min(Geo_0(1 - p_w), floor(n / k)) as a list over 0..floor(n/k)."""
    p = dist.word_prob(necklace.word)
    top = n // len(necklace)
    pmf = [(1 - p) * p**l for l in range(top)]
    pmf.append(p**top)
    return pmf


def expected_ck(dist: DiscreteDist, k: int, n: int, mode: str = "mobius",
                cap: int = ENUMERATION_CAP):
    """E(c_k) = (1/k) sum_{w in Q_k} sum_{l=1}^{floor(n/k)} p_w^l."""
    if k < 1:
        raise ValueError("k must be >= 1")
    top = n // k
    if mode == "mobius":
        total = sum((primitive_mass(dist, k, l) for l in range(1, top + 1)), 0 * _one(dist))
        return total / k
    if mode == "enumerate":
        probs = dist.finite_probs()
        total = 0 * _one(dist)
        for w in enumerate_necklaces(len(probs), k, cap):
            p = dist.word_prob(w.word)
            total += sum(p**l for l in range(1, top + 1))
        return total
    raise ValueError(f"unknown mode {mode!r}")


def joint_moment_D(dist: DiscreteDist, spec: Mapping[Necklace, int], n: int):
    """E(prod_j D_{w_j}^{r_j}) by summing increments against the joint tail."""
    items = [(w, r) for w, r in spec.items()]
    if not items:
        raise ValueError("moment spec must be nonempty")
    if any(r < 1 for _, r in items):
        raise ValueError("exponents must be positive")
    ps = [dist.word_prob(w.word) for w, _ in items]
    ks = [len(w) for w, _ in items]
    rs = [r for _, r in items]

    def rec(j: int, budget: int, weight):
        if j == len(items):
            return weight
        total = 0 * _one(dist)
        l = 1
        pl = ps[j]
        while ks[j] * l <= budget:
            inc = l ** rs[j] - (l - 1) ** rs[j]
            total += rec(j + 1, budget - ks[j] * l, weight * inc * pl)
            l += 1
            pl *= ps[j]
        return total

    return rec(0, n, _one(dist))


def uniform_joint_moment(spec: Mapping[int, int], n: int) -> Fraction:
    """E(prod C_k^{r_k}) for a uniform permutation of size n (distinct lengths k)."""
    items = sorted(spec.items())
    if not items or any(k < 1 or r < 1 for k, r in items):
        raise ValueError("lengths and exponents must be positive")

    def rec(j: int, used: int) -> Fraction:
        if j == len(items):
            return Fraction(1)
        k, r = items[j]
        total = Fraction(0)
        for m in range(1, r + 1):
            if used + k * m > n:
                break
            total += Fraction(stirling2(r, m), k**m) * rec(j + 1, used + k * m)
        return total

    return rec(0, 0)


def simplex_integral(exponents: Sequence[int]) -> Fraction:
    """Integral of prod x_j^(a_j - 1) over {x >= 0, sum x <= 1} for integers a_j >= 1."""
    if any(a < 1 for a in exponents):
        raise ValueError("exponents must be >= 1")
    return Fraction(prod(factorial(a - 1) for a in exponents), factorial(sum(exponents)))


def pd_joint_moment(t: Sequence[int]) -> Fraction:
    """E(m_{t_1}(Z) ... m_{t_r}(Z)) for Z Poisson-Dirichlet(1).

    Sums, over set partitions of the indices, the simplex integral with
    exponents given by the block sums of ``t``.
    """
    t = list(t)
    if not t or any(tj < 2 for tj in t):
        raise ValueError("need a nonempty list of integers >= 2")
    if len(t) > PD_MOMENT_CAP:
        raise CapExceeded(f"r = {len(t)} exceeds the cap {PD_MOMENT_CAP}")
    total = Fraction(0)
    for pi in enumerate_partitions(len(t)):
        total += simplex_integral([sum(t[j - 1] for j in b) for b in pi.blocks])
    return total
