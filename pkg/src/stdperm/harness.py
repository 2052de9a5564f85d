"""Monte Carlo replication loop: batched sampling and cycle statistics."""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .dist import DiscreteDist
from .sampling import RngStream, fisher_yates_rows, sample_atomless_perms, sample_sequences, standardize_rows

CHUNK_ENTRIES = 4_000_000
N_LAMBDA = 5

RowSampler = Callable[[int, int, RngStream], np.ndarray]


def std_sampler(dist: DiscreteDist) -> RowSampler:
    def sample(reps, n, rng):
        return standardize_rows(sample_sequences(dist, n, reps, rng))
    return sample


def uniform_sampler() -> RowSampler:
    return lambda reps, n, rng: fisher_yates_rows(reps, n, rng)


def atomless_sampler() -> RowSampler:
    return lambda reps, n, rng: sample_atomless_perms(reps, n, rng)


@dataclass
class CycleStats:
    """Per-replication cycle statistics; ``c[:, k-1]`` counts k-cycles."""

    n: int
    K: np.ndarray
    c: np.ndarray
    lam: np.ndarray
    m: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def reps(self) -> int:
        return len(self.K)

    @classmethod
    def concat(cls, parts: list["CycleStats"]) -> "CycleStats":
        ts = parts[0].m.keys()
        return cls(parts[0].n,
                   np.concatenate([p.K for p in parts]),
                   np.concatenate([p.c for p in parts]),
                   np.concatenate([p.lam for p in parts]),
                   {t: np.concatenate([p.m[t] for p in parts]) for t in ts})

    def write_csv(self, fh: TextIO) -> None:
        kmax = self.c.shape[1]
        ts = sorted(self.m)
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["rep", "n", "K"] + [f"c{k}" for k in range(1, kmax + 1)]
                   + [f"lambda{j}" for j in range(1, N_LAMBDA + 1)] + [f"m{t}" for t in ts])
        for r in range(self.reps):
            w.writerow([r, self.n, int(self.K[r])] + [int(v) for v in self.c[r]]
                       + [int(v) for v in self.lam[r]] + [repr(float(self.m[t][r])) for t in ts])


def cycle_stats(rows: np.ndarray, k_max: int = 5, ts=(2, 3)) -> CycleStats:
    """Cycle statistics of each row of a (reps, n) array of 0-based permutations."""
    reps, n = rows.shape
    total = reps * n
    if total == 0:
        return CycleStats(n, np.zeros(reps, np.int64), np.zeros((reps, k_max), np.int64),
                          np.zeros((reps, N_LAMBDA), np.int64), {t: np.zeros(reps) for t in ts})
    src = np.arange(total)
    dst = (rows + (np.arange(reps) * n)[:, None]).ravel()
    graph = csr_matrix((np.ones(total, np.int8), (src, dst)), shape=(total, total))
    ncomp, labels = connected_components(graph, directed=True, connection="weak")
    sizes = np.bincount(labels, minlength=ncomp)
    comp_row = np.empty(ncomp, np.int64)
    comp_row[labels] = src // n
    K = np.bincount(comp_row, minlength=reps)
    c = np.zeros((reps, k_max), np.int64)
    for k in range(1, k_max + 1):
        c[:, k - 1] = np.bincount(comp_row, weights=(sizes == k), minlength=reps)
    frac = sizes / n
    m = {t: np.bincount(comp_row, weights=frac**t, minlength=reps) for t in ts}
    # largest cycles per row: sort components by (row, -size)
    order = np.lexsort((-sizes, comp_row))
    srow, ssize = comp_row[order], sizes[order]
    first = np.searchsorted(srow, np.arange(reps))
    rank = np.arange(ncomp) - first[srow]
    lam = np.zeros((reps, N_LAMBDA), np.int64)
    keep = rank < N_LAMBDA
    lam[srow[keep], rank[keep]] = ssize[keep]
    return CycleStats(n, K, c, lam, m)


def simulate(sampler: RowSampler, n: int, reps: int, seed: int, streams: int = 1,
             k_max: int = 5, ts=(2, 3), threads: int = 1) -> CycleStats:
    """Split ``reps`` over ``streams`` RNG streams; results are merged in stream order."""
    streams = max(1, min(streams, reps)) if reps else 1
    shares = [reps // streams + (1 if s < reps % streams else 0) for s in range(streams)]
    chunk = max(1, CHUNK_ENTRIES // max(n, 1))

    def run(stream_id: int) -> CycleStats:
        rng = RngStream(seed, stream_id)
        parts = []
        left = shares[stream_id]
        while left > 0 or not parts:
            size = min(chunk, left)
            parts.append(cycle_stats(sampler(size, n, rng), k_max, ts))
            left -= size
        return CycleStats.concat(parts)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(streams)))
    else:
        results = [run(s) for s in range(streams)]
    return CycleStats.concat(results)
