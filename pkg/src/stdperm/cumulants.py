"""Set partitions, Stirling numbers and moment/cumulant conversion."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Callable, Iterable, Iterator, Sequence

from .errors import CapExceeded, GroundSetMismatch

PARTITION_CAP = 12

MomentOracle = Callable[[tuple[int, ...]], object]


@dataclass(frozen=True)
class SetPartition:
    """Blocks sorted internally and ordered by least element."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0]))
        if any(not b for b in blocks):
            raise ValueError("blocks must be nonempty")
        flat = [x for b in blocks for x in b]
        if len(flat) != len(set(flat)):
            raise ValueError("blocks must be disjoint")
        object.__setattr__(self, "blocks", blocks)

    @property
    def ground(self) -> frozenset[int]:
        return frozenset(x for b in self.blocks for x in b)

    def __len__(self) -> int:
        return len(self.blocks)

    @classmethod
    def singletons(cls, r: int) -> "SetPartition":
        return cls(tuple((j,) for j in range(1, r + 1)))

    @classmethod
    def whole(cls, r: int) -> "SetPartition":
        return cls((tuple(range(1, r + 1)),))


def _partitions_of(elements: Sequence[int]) -> Iterator[list[list[int]]]:
    """Restricted-growth enumeration of the partitions of ``elements``."""
    elements = list(elements)
    if not elements:
        yield []
        return
    blocks: list[list[int]] = []

    def rec(i: int):
        if i == len(elements):
            yield [list(b) for b in blocks]
            return
        x = elements[i]
        for b in blocks:
            b.append(x)
            yield from rec(i + 1)
            b.pop()
        blocks.append([x])
        yield from rec(i + 1)
        blocks.pop()

    yield from rec(0)


def enumerate_partitions(r: int, cap: int = PARTITION_CAP) -> Iterator[SetPartition]:
    if r > cap:
        raise CapExceeded(f"partitions of {r} elements exceed the cap r <= {cap}")
    for blocks in _partitions_of(range(1, r + 1)):
        yield SetPartition(tuple(tuple(b) for b in blocks))


@lru_cache(maxsize=None)
def stirling2(r: int, m: int) -> int:
    if r < 0 or m < 0:
        raise ValueError("negative argument")
    if r == m:
        return 1
    if m == 0 or m > r:
        return 0
    return m * stirling2(r - 1, m) + stirling2(r - 1, m - 1)


def bell(r: int) -> int:
    return sum(stirling2(r, m) for m in range(r + 1))


def partition_join(a: SetPartition, b: SetPartition) -> SetPartition:
    """Finest partition coarser than both (connected components of the union)."""
    if a.ground != b.ground:
        raise GroundSetMismatch("partitions are over different ground sets")
    parent = {x: x for x in a.ground}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for block in a.blocks + b.blocks:
        for x in block[1:]:
            rx, ry = find(block[0]), find(x)
            if rx != ry:
                parent[ry] = rx
    groups: dict[int, list[int]] = {}
    for x in a.ground:
        groups.setdefault(find(x), []).append(x)
    return SetPartition(tuple(tuple(g) for g in groups.values()))


def mobius_coefficient(blocks: int) -> int:
    """mu(pi, 1) on the partition lattice: (|pi| - 1)! (-1)^(|pi| - 1)."""
    return (-1) ** (blocks - 1) * factorial(blocks - 1)


def joint_cumulant(moment_oracle: MomentOracle, indices: Iterable[int]):
    """kappa(X_j, j in indices) from joint moments E(prod_{j in B} X_j)."""
    indices = tuple(sorted(indices))
    total = 0
    for blocks in _partitions_of(indices):
        total += mobius_coefficient(len(blocks)) * prod(
            moment_oracle(tuple(sorted(b))) for b in blocks)
    return total


def cumulant_from_moments(moment_oracle: MomentOracle, r: int):
    return joint_cumulant(moment_oracle, range(1, r + 1))


def moment_from_cumulants(cumulant_oracle: MomentOracle, indices: Iterable[int]):
    """Inverse transform: E(prod X_j) = sum over partitions of products of cumulants."""
    indices = tuple(sorted(indices))
    return sum(prod(cumulant_oracle(tuple(sorted(b))) for b in blocks)
               for blocks in _partitions_of(indices))


def leonov_shiryaev_check(moment_oracle: MomentOracle, pi0: SetPartition):
    """Both sides of the Leonov-Shiryaev formula for the block products of ``pi0``.

    lhs is the joint cumulant of Y_B = prod_{j in B} X_j over B in pi0; rhs sums
    prod_{B in pi} kappa(X_j, j in B) over partitions pi with pi v pi0 = 1.
    """
    r = len(pi0.ground)
    if pi0.ground != frozenset(range(1, r + 1)):
        raise GroundSetMismatch("pi0 must partition {1..r}")
    blocks = pi0.blocks

    def block_moment(block_ids: tuple[int, ...]):
        return moment_oracle(tuple(sorted(x for b in block_ids for x in blocks[b - 1])))

    lhs = joint_cumulant(block_moment, range(1, len(blocks) + 1))

    one = SetPartition.whole(r)
    cumulant_cache: dict[tuple[int, ...], object] = {}

    def kappa(b: tuple[int, ...]):
        if b not in cumulant_cache:
            cumulant_cache[b] = joint_cumulant(moment_oracle, b)
        return cumulant_cache[b]

    rhs = 0
    for pi in enumerate_partitions(r):
        if partition_join(pi, pi0) == one:
            rhs += prod(kappa(b) for b in pi.blocks)
    return lhs, rhs
