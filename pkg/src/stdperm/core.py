"""Sequences, standardization, permutations, cycles and run functions.

Symbols are non-negative integers; only their order matters. Permutations
are stored in one-line notation with 1-based values, position ``j`` (1-based)
holding ``sigma(j)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError

Word = tuple[int, ...]


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..n} in one-line notation."""

    one_line: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "one_line", tuple(int(v) for v in self.one_line))
        if sorted(self.one_line) != list(range(1, len(self.one_line) + 1)):
            raise ValueError(f"not a permutation of 1..n: {self.one_line}")

    def __len__(self) -> int:
        return len(self.one_line)

    def __call__(self, j: int) -> int:
        return self.one_line[j - 1]

    def __str__(self) -> str:
        return " ".join(map(str, self.one_line))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for j, v in enumerate(self.one_line, start=1):
            inv[v - 1] = j
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        return cycle_decomposition(self)

    def cycle_type(self) -> dict[int, int]:
        """Map cycle length -> number of cycles of that length."""
        counts: dict[int, int] = {}
        for c in self.cycles():
            counts[len(c)] = counts.get(len(c), 0) + 1
        return counts

    def restrict(self, support: Iterable[int]) -> "Permutation":
        """Order-isomorphic relabelling of the restriction to an invariant set."""
        support = sorted(support)
        rank = {x: r for r, x in enumerate(support, start=1)}
        try:
            return Permutation(tuple(rank[self(x)] for x in support))
        except KeyError:
            raise ValueError("support is not invariant under the permutation") from None


def standardize(g: Sequence[int]) -> Permutation:
    """Rank positions of ``g`` by value, breaking ties left to right."""
    order = sorted(range(len(g)), key=lambda j: (g[j], j))
    sigma = [0] * len(g)
    for rank, j in enumerate(order, start=1):
        sigma[j] = rank
    return Permutation(tuple(sigma))


def cycle_decomposition(sigma: Permutation) -> list[tuple[int, ...]]:
    """Cycles of ``sigma``, each starting at its least element, sorted by that element."""
    seen = [False] * (len(sigma) + 1)
    cycles = []
    for start in range(1, len(sigma) + 1):
        if seen[start]:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = sigma(x)
        cycles.append(tuple(cycle))
    return cycles


@dataclass(frozen=True)
class RunFunction:
    """The run L_i of symbol ``i`` evaluated at 0..n."""

    symbol: int
    table: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.table[x]

    def fixed_points(self) -> list[int]:
        return [x for x, v in enumerate(self.table) if v == x]


def run_function(g: Sequence[int], i: int) -> RunFunction:
    """L_i(0) = #{k : g_k < i}, then +1 at every k with g_k = i."""
    level = sum(1 for v in g if v < i)
    table = [level]
    for v in g:
        if v == i:
            level += 1
        table.append(level)
    return RunFunction(i, tuple(table))


def compose_runs(g: Sequence[int], word: Sequence[int]) -> tuple[int, ...]:
    """Table of L_{w_k} o ... o L_{w_1} on 0..n (``word[0]`` is applied first)."""
    if len(word) == 0:
        raise ValueError("word must be nonempty")
    runs = {i: run_function(g, i).table for i in set(word)}
    table = list(range(len(g) + 1))
    for letter in word:
        run = runs[letter]
        table = [run[x] for x in table]
    return tuple(table)


def typed_fixed_points(table: Sequence[int]) -> list[int]:
    """Points x >= 1 with L(x) = x and L(x-1) = x-1; one per typed cycle."""
    return [x for x in range(1, len(table)) if table[x] == x and table[x - 1] == x - 1]


def major_index(sigma: Permutation) -> int:
    return sum(i for i in range(1, len(sigma)) if sigma(i) > sigma(i + 1))


def parse_sequence(line: str) -> Word:
    try:
        values = tuple(int(tok) for tok in line.split())
    except ValueError as exc:
        raise ParseError(f"bad sequence line: {line!r}") from exc
    if any(v < 0 for v in values):
        raise ParseError(f"symbols must be non-negative: {line!r}")
    return values


def format_sequence(g: Sequence[int]) -> str:
    return " ".join(map(str, g))


def parse_permutation(line: str) -> Permutation:
    try:
        return Permutation(tuple(int(tok) for tok in line.split()))
    except ValueError as exc:
        raise ParseError(f"bad permutation line: {line!r}") from exc
