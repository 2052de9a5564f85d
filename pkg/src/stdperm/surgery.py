"""Typed cycle construction, insertion and removal, and the typed cycle census."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .core import Permutation, compose_runs, run_function, standardize, typed_fixed_points
from .errors import InternalInvariant, NoSuchCycle, NonPrimitive
from .words import Necklace, Word, format_word, is_primitive, necklace_of, reverse, rotate


@dataclass(frozen=True)
class CycleTypeWitness:
    """The unique length-k sequence whose standardization is a k-cycle of type ``word``.

    ``support_order[j]`` is the 1-based position x_{j+1} holding ``word[j]``; the
    cycle maps x_1 -> x_2 -> ... -> x_k -> x_1.
    """

    word: Word
    generator: tuple[int, ...]
    support_order: tuple[int, ...]


def unique_cycle_generator(word: Sequence[int]) -> CycleTypeWitness:
    word = tuple(word)
    if not is_primitive(word):
        raise NonPrimitive(f"{format_word(word)} is a nontrivial power")
    k = len(word)
    # conjugate of the reversed word ending with word[j]
    conjugates = [reverse(rotate(word, j)) for j in range(k)]
    ranked = sorted(range(k), key=lambda j: conjugates[j])
    x = [0] * k
    for rank, j in enumerate(ranked, start=1):
        x[j] = rank
    g = [0] * k
    for j in range(k):
        g[x[j] - 1] = word[j]
    return CycleTypeWitness(word, tuple(g), tuple(x))


def _insertion_points(g: Sequence[int], word: Word) -> list[int]:
    """a_1 = least fixed point of L_word, a_{j+1} = L_{word[j]}(a_j)."""
    table = compose_runs(g, word)
    a = next(x for x, v in enumerate(table) if v == x)
    runs = {i: run_function(g, i).table for i in set(word)}
    points = [a]
    for letter in word[:-1]:
        points.append(runs[letter][points[-1]])
    return points


def insert_cycle(g: Sequence[int], word: Sequence[int]) -> tuple[int, ...]:
    """Add one cycle of type ``word`` to std(g) without disturbing the rest."""
    word = tuple(word)
    witness = unique_cycle_generator(word)
    points = _insertion_points(g, word)
    # letters go in generator order; collided insertion points keep that order
    by_rank = sorted(range(len(word)), key=lambda j: witness.support_order[j])
    out: list[int] = []
    cursor = 0
    for j in by_rank:
        a = points[j]
        if a < cursor:
            raise InternalInvariant("insertion points are not monotone in generator order")
        out.extend(g[cursor:a])
        out.append(word[j])
        cursor = a
    out.extend(g[cursor:])
    return tuple(out)


def locate_cycle(g: Sequence[int], word: Sequence[int]) -> tuple[int, ...]:
    """Positions x_1..x_k of the cycle of type ``word`` at the least fixed point of L_word."""
    word = tuple(word)
    if not is_primitive(word):
        raise NonPrimitive(f"{format_word(word)} is a nontrivial power")
    table = compose_runs(g, word)
    starts = typed_fixed_points(table)
    if not starts:
        raise NoSuchCycle(f"no cycle of type {format_word(word)}")
    runs = {i: run_function(g, i).table for i in set(word)}
    positions = [starts[0]]
    for letter in word[:-1]:
        positions.append(runs[letter][positions[-1]])
    return tuple(positions)


def remove_cycle(g: Sequence[int], word: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`insert_cycle`."""
    positions = set(locate_cycle(g, word))
    return tuple(v for x, v in enumerate(g, start=1) if x not in positions)


@dataclass
class CycleCensus:
    by_type: Counter = field(default_factory=Counter)
    by_length: list[int] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.by_length)

    def D(self, w) -> int:
        if not isinstance(w, Necklace):
            w = necklace_of(w)
        return self.by_type.get(w, 0)

    def c(self, k: int) -> int:
        return self.by_length[k - 1] if 1 <= k <= len(self.by_length) else 0


def census_by_type(g: Sequence[int], sigma: Permutation | None = None) -> CycleCensus:
    """Count cycles of std(g) by the necklace of the values read along each cycle."""
    if sigma is None:
        sigma = standardize(g)
    census = CycleCensus(Counter(), [0] * len(g))
    for cycle in sigma.cycles():
        values = tuple(g[x - 1] for x in cycle)
        if not is_primitive(values):
            raise InternalInvariant(f"cycle {cycle} reads the non-primitive word {values}")
        census.by_type[necklace_of(values)] += 1
        census.by_length[len(cycle) - 1] += 1
    return census
