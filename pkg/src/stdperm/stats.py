"""Statistical verdicts for the Monte Carlo experiments.

All tests run at ``ALPHA`` with 4-sigma moment bands. Every report carries the
configuration that produced it along with a SHA-256 hash of its canonical JSON.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Any, Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as sps

from .core import Permutation, major_index
from .cumulants import cumulant_from_moments
from .dist import DiscreteDist
from .errors import CapExceeded, Degenerate, RViolation
from .exact import pd_joint_moment
from .harness import CycleStats, simulate, std_sampler, uniform_sampler
from .sampling import (DEFAULT_SEED, RngStream, sample_atomless_perms, sample_major_biased,
                       sample_riffle_oracle, sample_sequences, standardize_rows)
from .words import Word, is_primitive, least_rotation_index, primitive_mass

ALPHA = 0.001
SIGMA_BAND = 4.0
MIN_CELL = 5
RESIDUAL_TARGET = 1e-9
NECKLACE_LIMIT = 2_000_000
R_DEFAULT = 0.999


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(config: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


@dataclass
class EmpiricalDist:
    counts: Counter
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts do not sum to total")

    @classmethod
    def from_samples(cls, samples: Iterable[Hashable]) -> "EmpiricalDist":
        if isinstance(samples, np.ndarray):
            samples = samples.tolist()
        counts = Counter(samples)
        return cls(counts, sum(counts.values()))

    def pmf(self, outcome) -> float:
        return self.counts.get(outcome, 0) / self.total


@dataclass
class TestReport:
    name: str
    statistic: float
    dof: int
    p_value: float
    passed: bool
    alpha: float = ALPHA
    standard_errors: dict | None = None
    details: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    config_hash: str = ""

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        if self.config and not self.config_hash:
            self.config_hash = config_hash(self.config)

    def to_dict(self) -> dict:
        return json.loads(canonical_json(asdict(self)))

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}  {self.name:<28} stat={self.statistic:.4g} dof={self.dof} "
                f"p={self.p_value:.4g}")


def _as_cells(expected) -> list[tuple[Any, float]]:
    if isinstance(expected, Mapping):
        return [(k, float(v)) for k, v in expected.items()]
    return [(i, float(v)) for i, v in enumerate(expected)]


def chi_square(emp: EmpiricalDist, expected, min_cell: int = MIN_CELL,
               alpha: float = ALPHA, name: str = "chi-square") -> TestReport:
    """Pearson goodness of fit against a pmf (sequence indexed from 0, or a mapping).

    Consecutive cells whose expected count falls below ``min_cell`` are merged;
    mass the pmf leaves unassigned and outcomes outside its support share a
    tail cell, which is merged into its neighbour if it is too small.
    """
    cells = _as_cells(expected)
    total = sum(p for _, p in cells)
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"expected pmf sums to {total}, not 1")
    n = emp.total
    listed = {k for k, _ in cells}
    obs_rest = sum(c for k, c in emp.counts.items() if k not in listed)
    exp_rest = max(0.0, 1.0 - total)

    merged_obs, merged_exp = [], []
    acc_o, acc_e = 0, 0.0
    for k, p in cells:
        acc_o += emp.counts.get(k, 0)
        acc_e += p
        if acc_e * n >= min_cell:
            merged_obs.append(acc_o)
            merged_exp.append(acc_e)
            acc_o, acc_e = 0, 0.0
    acc_o += obs_rest
    acc_e += exp_rest
    if acc_o or acc_e > 0:
        if merged_exp and acc_e * n < min_cell:
            merged_obs[-1] += acc_o
            merged_exp[-1] += acc_e
        else:
            merged_obs.append(acc_o)
            merged_exp.append(acc_e)
    if len(merged_exp) < 2:
        raise Degenerate("fewer than two cells after merging")
    obs = np.array(merged_obs, float)
    exp = np.array(merged_exp) * n
    if (exp <= 0).any():
        # observations in a cell of zero probability: reject outright
        return TestReport(name, math.inf, len(exp) - 1, 0.0, False, alpha,
                          details={"cells": len(exp)})
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = len(exp) - 1
    p = float(sps.chi2.sf(stat, dof))
    return TestReport(name, stat, dof, p, p >= alpha, alpha, details={"cells": len(exp)})


def homogeneity(a: EmpiricalDist, b: EmpiricalDist, min_cell: int = MIN_CELL,
                alpha: float = ALPHA, name: str = "two-sample chi-square") -> TestReport:
    """Chi-square test that two samples come from the same law."""
    keys = sorted(set(a.counts) | set(b.counts), key=repr)
    table = np.array([[a.counts.get(k, 0) for k in keys], [b.counts.get(k, 0) for k in keys]], float)
    # merge sparse columns into one
    small = table.sum(axis=0) < 2 * min_cell
    if small.any():
        table = np.column_stack([table[:, ~small], table[:, small].sum(axis=1)])
        if table[:, -1].sum() < 2 * min_cell and table.shape[1] > 1:
            table[:, -2] += table[:, -1]
            table = table[:, :-1]
    if table.shape[1] < 2:
        raise Degenerate("fewer than two cells after merging")
    stat, p, dof, _ = sps.chi2_contingency(table, correction=False)
    return TestReport(name, float(stat), int(dof), float(p), p >= alpha, alpha,
                      details={"cells": table.shape[1]})


def moment_band(samples: np.ndarray, target: float, name: str,
                band: float = SIGMA_BAND) -> TestReport:
    """Pass when the sample mean lies within ``band`` standard errors of ``target``."""
    samples = np.asarray(samples, float)
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(len(samples)))
    z = (mean - target) / se if se > 0 else (0.0 if mean == target else math.inf)
    p = float(2 * sps.norm.sf(abs(z)))
    return TestReport(name, z, 0, p, abs(z) <= band, 2 * float(sps.norm.sf(band)),
                      standard_errors={"mean": se},
                      details={"mean": mean, "target": float(target), "z": z})


def poisson_pmf(lam: float, top: int) -> list[float]:
    return [float(v) for v in sps.poisson.pmf(np.arange(top + 1), lam)]


def _prob_order(dist: DiscreteDist) -> tuple[list[int], list[float]]:
    """Letters sorted by decreasing probability, with their float probabilities."""
    if dist.kind == "geometric":
        q = float(dist.q)
        m = int(math.log(1e-300) / math.log(q))
        return list(range(m)), [(1 - q) * q**i for i in range(m)]
    probs = dist.float_probs()
    order = sorted(range(len(probs)), key=lambda i: -probs[i])
    return order, [probs[i] for i in order]


def _is_lyndon(word: Word) -> bool:
    return is_primitive(word) and least_rotation_index(word) == 0


def necklace_weights(dist: DiscreteDist, k: int, target: float = RESIDUAL_TARGET,
                     limit: int = NECKLACE_LIMIT) -> tuple[list[float], float]:
    """Probabilities p_w of the most likely aperiodic necklaces of length k.

    Includes necklaces in decreasing order of p_w until the omitted mass,
    computed exactly as (1/k) sum_d mu(d) P_{k/d}^d - included, is below
    ``target``. Raises CapExceeded if that takes more than ``limit`` necklaces.
    """
    letters, probs = _prob_order(dist)
    total = float(primitive_mass(dist, k)) / k
    eps = 1e-3
    while True:
        found: list[float] = []

        def dfs(prefix: list[int], pr: float):
            if len(prefix) == k:
                if _is_lyndon(tuple(prefix)):
                    found.append(pr)
                    if len(found) > limit:
                        raise CapExceeded(f"more than {limit} necklaces needed for k={k}")
                return
            for letter, p in zip(letters, probs):
                if pr * p < eps:
                    break
                prefix.append(letter)
                dfs(prefix, pr * p)
                prefix.pop()

        dfs([], 1.0)
        residual = max(0.0, total - math.fsum(found))
        if residual < target or eps < 1e-300:
            if residual >= target:
                raise CapExceeded(f"residual mass {residual:.3g} above target for k={k}")
            return sorted(found, reverse=True), residual
        eps *= 1e-3


def geometric_sum_pmf(weights: Sequence[float], top: int = 400, tol: float = 1e-15) -> list[float]:
    """pmf of sum_w Geo_0(1 - p_w) on 0..top (mass beyond top is dropped)."""
    pmf = np.zeros(top + 1)
    pmf[0] = 1.0
    for p in weights:
        if p <= 0:
            continue
        length = min(top, int(math.log(tol) / math.log(p)) + 1 if p < 1 else top)
        g = (1 - p) * p ** np.arange(length + 1)
        pmf = np.convolve(pmf, g)[: top + 1]
    # trim the negligible far tail
    last = int(np.nonzero(pmf > tol)[0].max()) if (pmf > tol).any() else 0
    return [float(v) for v in pmf[: last + 1]]


def fixed_limit_pmf(dist: DiscreteDist, k: int, target: float = RESIDUAL_TARGET) -> tuple[list[float], float]:
    """Limit law of c_k for a fixed distribution, and the omitted necklace mass."""
    weights, residual = necklace_weights(dist, k, target)
    return geometric_sum_pmf(weights), residual


def _config(**kw) -> dict:
    out = {}
    for key, val in kw.items():
        if isinstance(val, DiscreteDist):
            val = val.label()
        out[key] = val
    return out


def _attach(report: TestReport, config: dict) -> TestReport:
    report.config = config
    report.config_hash = config_hash(config)
    return report


def _check_R(dist: DiscreteDist, R: float):
    if not 0 < R < 1:
        raise ValueError("R must lie in (0, 1)")
    if float(dist.max_prob()) > R:
        raise RViolation(f"max letter probability {float(dist.max_prob())} exceeds R = {R}")


def correlation_report(x: np.ndarray, y: np.ndarray, name: str) -> TestReport:
    """Asymptotic-independence spot check: |corr| within 4/sqrt(reps)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    reps = len(x)
    if x.std() == 0 or y.std() == 0:
        r = 0.0
    else:
        r = float(np.corrcoef(x, y)[0, 1])
    z = r * math.sqrt(reps)
    return TestReport(name, r, 0, float(2 * sps.norm.sf(abs(z))), abs(z) <= SIGMA_BAND,
                      2 * float(sps.norm.sf(SIGMA_BAND)),
                      standard_errors={"corr": 1 / math.sqrt(reps)}, details={"z": z})


def verify_small_cycles_fixed(dist: DiscreteDist, n: int, k_max: int, reps: int,
                              seed: int = DEFAULT_SEED, streams: int = 1,
                              threads: int = 1, sample: CycleStats | None = None) -> list[TestReport]:
    """Chi-square of each c_k, k <= k_max, against its fixed-distribution limit law."""
    config = _config(test="small-fixed", dist=dist, n=n, k_max=k_max, reps=reps,
                     seed=seed, streams=streams)
    if sample is None:
        sample = simulate(std_sampler(dist), n, reps, seed, streams, k_max=k_max, threads=threads)
    reports = []
    for k in range(1, k_max + 1):
        pmf, residual = fixed_limit_pmf(dist, k)
        rep = chi_square(EmpiricalDist.from_samples(sample.c[:, k - 1]), pmf, name=f"c{k} limit law")
        rep.details["residual_mass"] = residual
        rep.details["mean"] = float(sample.c[:, k - 1].mean())
        reports.append(_attach(rep, config))
    if k_max >= 2:
        reports.append(_attach(correlation_report(sample.c[:, 0], sample.c[:, 1], "corr(c1, c2)"), config))
    return reports


def verify_small_cycles_spreading(q: int | None, n: int, k_max: int, reps: int,
                                  seed: int = DEFAULT_SEED, streams: int = 1,
                                  threads: int = 1) -> list[TestReport]:
    """c_k against Poisson(1/k) for a uniform alphabet of size q (default q = n)."""
    q = n if q is None else q
    dist = DiscreteDist.uniform(q)
    config = _config(test="small-spreading", dist=dist, n=n, k_max=k_max, reps=reps,
                     seed=seed, streams=streams)
    sample = simulate(std_sampler(dist), n, reps, seed, streams, k_max=k_max, threads=threads)
    reports = []
    for k in range(1, k_max + 1):
        ck = sample.c[:, k - 1]
        reports.append(_attach(chi_square(EmpiricalDist.from_samples(ck), poisson_pmf(1 / k, 60),
                                          name=f"c{k} ~ Poisson(1/{k})"), config))
        reports.append(_attach(moment_band(ck, 1 / k, f"mean c{k} = 1/{k}"), config))
    if k_max >= 2:
        c1 = np.minimum(sample.c[:, 0], 3)
        c2 = np.minimum(sample.c[:, 1], 2)
        table = np.zeros((4, 3))
        np.add.at(table, (c1, c2), 1)
        table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
        stat, p, dof, _ = sps.chi2_contingency(table, correction=False)
        reports.append(_attach(TestReport("(c1, c2) independence", float(stat), int(dof),
                                          float(p), p >= ALPHA), config))
    return reports


def _pd_products(sample: CycleStats, t_specs: Sequence[Sequence[int]]) -> list[np.ndarray]:
    return [np.prod([sample.m[t] for t in spec], axis=0) for spec in t_specs]


def verify_pd(dist: DiscreteDist | None, n: int, reps: int, t_specs: Sequence[Sequence[int]],
              seed: int = DEFAULT_SEED, streams: int = 1, threads: int = 1,
              R: float = R_DEFAULT) -> list[TestReport]:
    """Empirical means of prod_j m_{t_j}(lambda / n) against the PD(1) joint moments.

    ``dist=None`` runs the uniform-permutation (Fisher-Yates) control.
    """
    t_specs = [tuple(int(t) for t in spec) for spec in t_specs]
    if dist is not None:
        _check_R(dist, R)
        sampler = std_sampler(dist)
    else:
        sampler = uniform_sampler()
    config = _config(test="pd", dist=dist if dist is not None else "fisher-yates", n=n,
                     reps=reps, t_specs=t_specs, seed=seed, streams=streams)
    ts = tuple(sorted({t for spec in t_specs for t in spec}))
    sample = simulate(sampler, n, reps, seed, streams, k_max=1, ts=ts, threads=threads)
    reports = []
    for spec, values in zip(t_specs, _pd_products(sample, t_specs)):
        target = pd_joint_moment(spec)
        rep = moment_band(values, float(target), "E " + " ".join(f"m{t}" for t in spec))
        rep.details["target_exact"] = str(target)
        reports.append(_attach(rep, config))
    return reports


def empirical_cumulants(samples, r_max: int) -> list[float]:
    """Plug-in cumulants kappa_1..kappa_{r_max} from raw sample moments."""
    if not 1 <= r_max <= 6:
        raise ValueError("r_max must lie in 1..6")
    x = np.asarray(samples, float)
    if len(x) < 10 * 2**r_max:
        raise ValueError(f"need at least {10 * 2**r_max} samples for r_max = {r_max}")
    # centre first for numerical stability, then shift kappa_1 back
    shift = float(x.mean())
    y = x - shift
    raw = [1.0] + [float(np.mean(y**j)) for j in range(1, r_max + 1)]
    out = []
    for r in range(1, r_max + 1):
        out.append(cumulant_from_moments(lambda b: raw[len(b)], r))
    out[0] += shift
    return [float(v) for v in out]


def ks_lattice(values: np.ndarray, loc: float, scale: float) -> float:
    """KS distance between integer data and N(loc, scale^2) with continuity correction.

    The empirical CDF is compared with the normal CDF at half-integers, i.e.
    against the normal law rounded to the lattice.
    """
    values = np.sort(np.asarray(values))
    grid = np.arange(values[0] - 1, values[-1] + 1)
    ecdf = np.searchsorted(values, grid, side="right") / len(values)
    ncdf = sps.norm.cdf((grid + 0.5 - loc) / scale)
    tails = max(sps.norm.cdf((grid[0] - 0.5 - loc) / scale), sps.norm.sf((grid[-1] + 0.5 - loc) / scale))
    return float(max(np.abs(ecdf - ncdf).max(), tails))


def verify_clt(dist: DiscreteDist, n_grid: Sequence[int], reps: int, seed: int = DEFAULT_SEED,
               streams: int = 1, threads: int = 1, R: float = R_DEFAULT,
               band: tuple[float, float] = (0.8, 1.2), ks_max: float = 0.08) -> TestReport:
    """Property checks on K_n: moment ratios to log n, skewness trend and KS distance.

    The KS statistic uses the limit standardization (K_n - log n) / sqrt(log n).
    """
    _check_R(dist, R)
    n_grid = sorted(int(n) for n in n_grid)
    config = _config(test="clt", dist=dist, n_grid=n_grid, reps=reps, seed=seed,
                     streams=streams, band=list(band), ks_max=ks_max)
    rows = []
    for idx, n in enumerate(n_grid):
        K = simulate(std_sampler(dist), n, reps, seed + idx, streams, k_max=1,
                     ts=(2,), threads=threads).K.astype(float)
        L = math.log(n)
        kappa = empirical_cumulants(K, 4) if len(K) >= 160 else [math.nan] * 4
        rows.append({
            "n": n,
            "log_n": L,
            "mean_ratio": float(K.mean() / L),
            "var_ratio": float(K.var() / L),
            "skewness": float(sps.skew(K)),
            "kappa": kappa,
            "ks_limit": ks_lattice(K, L, math.sqrt(L)),
            "ks_limit_raw": float(sps.kstest((K - L) / math.sqrt(L), "norm").statistic),
            "ks_studentized": ks_lattice(K, K.mean(), K.std()),
        })
    last = rows[-1]
    skews = [abs(r["skewness"]) for r in rows]
    checks = {
        "mean_ratio": band[0] <= last["mean_ratio"] <= band[1],
        "var_ratio": band[0] <= last["var_ratio"] <= band[1],
        "skew_trend": all(b <= a for a, b in zip(skews, skews[1:])),
        "ks": last["ks_limit"] < ks_max,
    }
    p = float(sps.kstwo.sf(last["ks_limit"], reps))
    return TestReport("K_n CLT", last["ks_limit"], 0, min(1.0, max(0.0, p)), all(checks.values()),
                      details={"grid": rows, "checks": checks}, config=config)


def maj_pmf(q: Fraction | float, n: int) -> dict[tuple[int, ...], float]:
    """pmf proportional to q^maj over S_n, keyed by one-line tuples."""
    weights = {p: q ** major_index(Permutation(p)) for p in permutations(range(1, n + 1))}
    z = sum(weights.values())
    return {p: float(w / z) for p, w in weights.items()}


def _row_keys(rows: np.ndarray) -> list[tuple[int, ...]]:
    return [tuple(int(v) + 1 for v in row) for row in rows]


def verify_special(reps: int = 100_000, seed: int = DEFAULT_SEED, riffle_n: int = 4,
                   maj_n: int = 3, maj_q: float = 0.5) -> list[TestReport]:
    """Distributional identities of three special cases, each on its own RNG stream.

    * std of a uniform binary sequence against the forward two-packet riffle;
    * std(-G)^(-1), G geometric, against q^maj / Z;
    * std of distinct random keys against the uniform law.
    """
    config = _config(test="special", reps=reps, seed=seed, riffle_n=riffle_n,
                     maj_n=maj_n, maj_q=maj_q)
    reports = []

    rows = standardize_rows(sample_sequences(DiscreteDist.uniform(2), riffle_n, reps, RngStream(seed, 0)))
    rng = RngStream(seed, 1)
    riffle = [sample_riffle_oracle(2, riffle_n, rng).one_line for _ in range(reps)]
    reports.append(_attach(homogeneity(EmpiricalDist.from_samples(_row_keys(rows)),
                                       EmpiricalDist.from_samples(riffle),
                                       name=f"std(uniform 2) ~ riffle, S_{riffle_n}"), config))

    rng = RngStream(seed, 2)
    maj = [sample_major_biased(maj_q, maj_n, rng).one_line for _ in range(reps)]
    reports.append(_attach(chi_square(EmpiricalDist.from_samples(maj), maj_pmf(maj_q, maj_n),
                                      name=f"std(-G)^-1 ~ q^maj, S_{maj_n}"), config))

    rows = sample_atomless_perms(reps, riffle_n, RngStream(seed, 3))
    uniform = {p: 1 / math.factorial(riffle_n) for p in permutations(range(1, riffle_n + 1))}
    reports.append(_attach(chi_square(EmpiricalDist.from_samples(_row_keys(rows)), uniform,
                                      name=f"distinct keys ~ uniform, S_{riffle_n}"), config))
    return reports
