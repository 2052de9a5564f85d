from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from stdperm.dist import DiscreteDist
from stdperm.errors import Degenerate, RViolation
from stdperm.sampling import RngStream
from stdperm.stats import (EmpiricalDist, TestReport, chi_square, config_hash, empirical_cumulants,
                           fixed_limit_pmf, homogeneity, ks_lattice, maj_pmf, necklace_weights,
                           poisson_pmf, verify_clt, verify_pd, verify_small_cycles_fixed,
                           verify_small_cycles_spreading)


def poisson_draws(lam, size, seed):
    return sps.poisson.ppf(RngStream(seed, 0).uniform(size), lam).astype(int)


def test_empirical_dist():
    e = EmpiricalDist.from_samples([1, 1, 2])
    assert e.total == 3 and e.pmf(1) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        EmpiricalDist(e.counts, 4)


def test_chi_square_calibration():
    passes = sum(chi_square(EmpiricalDist.from_samples(poisson_draws(1, 2000, s)),
                            poisson_pmf(1, 40)).passed for s in range(200))
    assert passes >= 198


def test_chi_square_power():
    rep = chi_square(EmpiricalDist.from_samples(poisson_draws(2, 10_000, 1)), poisson_pmf(1, 40))
    assert not rep.passed and rep.p_value < 1e-10


def test_chi_square_degenerate_and_bad_pmf():
    with pytest.raises(Degenerate):
        chi_square(EmpiricalDist.from_samples([0] * 10), [1.0])
    with pytest.raises(ValueError):
        chi_square(EmpiricalDist.from_samples([0, 1]), [0.3, 0.3])


def test_chi_square_outside_support_lands_in_tail():
    e = EmpiricalDist.from_samples([0] * 500 + [1] * 500 + [7])
    rep = chi_square(e, [0.5, 0.5])
    assert rep.details["cells"] == 2


def test_homogeneity():
    a = EmpiricalDist.from_samples(poisson_draws(1, 5000, 1))
    b = EmpiricalDist.from_samples(poisson_draws(1, 5000, 2))
    c = EmpiricalDist.from_samples(poisson_draws(1.5, 5000, 3))
    assert homogeneity(a, b).passed
    assert not homogeneity(a, c).passed


def test_report_hash_and_bounds():
    r = TestReport("x", 1.0, 1, 0.5, True, config={"b": 1, "a": [1, 2]})
    assert r.config_hash == config_hash({"a": [1, 2], "b": 1})
    assert len(r.config_hash) == 64
    with pytest.raises(ValueError):
        TestReport("x", 1.0, 1, 1.5, True)


def test_fixed_limit_closed_form():
    pmf, residual = fixed_limit_pmf(DiscreteDist.uniform(2), 1)
    # Geo_0(1/2) * Geo_0(1/2) is negative binomial: (m + 1) / 2^(m + 2)
    assert residual == 0
    assert pmf[:10] == pytest.approx([(m + 1) / 2 ** (m + 2) for m in range(10)])


def test_necklace_weights_geometric_residual():
    d = DiscreteDist.geometric(Fraction(7, 10))
    for k in (1, 2):
        weights, residual = necklace_weights(d, k)
        assert residual < 1e-9
        assert weights == sorted(weights, reverse=True)
        pmf, _ = fixed_limit_pmf(d, k)
        assert sum(pmf) == pytest.approx(1.0, abs=1e-8)


def test_empirical_cumulants_constant():
    k = empirical_cumulants(np.full(1000, 3.0), 4)
    assert k[0] == pytest.approx(3.0) and all(abs(v) < 1e-9 for v in k[1:])


def test_empirical_cumulants_normal():
    n = 1_000_000
    x = sps.norm.ppf(RngStream(2, 0).uniform(n))
    k1, k2, k3, k4 = empirical_cumulants(x, 4)
    assert abs(k2 - 1) < 5 * np.sqrt(2 / n)
    assert abs(k3) < 5 * np.sqrt(6 / n)
    assert abs(k4) < 5 * np.sqrt(24 / n)


def test_empirical_cumulants_poisson():
    lam = 2.0
    k = empirical_cumulants(poisson_draws(lam, 400_000, 4), 4)
    assert k == pytest.approx([lam] * 4, rel=0.1)


def test_empirical_cumulants_needs_samples():
    with pytest.raises(ValueError):
        empirical_cumulants(np.ones(50), 4)


def test_ks_lattice_exact_normal_rounding():
    # integer-rounded normal draws are at lattice distance ~0 from the rounded law
    x = np.floor(sps.norm.ppf(RngStream(5, 0).uniform(50_000), 10, 3) + 0.5)
    assert ks_lattice(x, 10, 3) < 0.01
    assert ks_lattice(x + 2, 10, 3) > 0.2


def test_maj_pmf():
    pmf = maj_pmf(Fraction(1, 2), 3)
    assert sum(pmf.values()) == pytest.approx(1)
    assert pmf[(1, 2, 3)] == pytest.approx(1 / (1 + 0.5) / (1 + 0.5 + 0.25))


def test_verify_fixed_geometric():
    reports = verify_small_cycles_fixed(DiscreteDist.geometric(0.7), 500, 2, 4000, seed=3)
    assert all(r.passed for r in reports), [r.summary() for r in reports]
    assert reports[0].config_hash == reports[1].config_hash


def test_verify_spreading_detects_fixed_alphabet():
    reports = verify_small_cycles_spreading(2, 500, 1, 4000, seed=3)
    assert not all(r.passed for r in reports)


def test_verify_pd_r_violation():
    with pytest.raises(RViolation):
        verify_pd(DiscreteDist.finite([0.9995, 0.0005]), 100, 10, [(2,)])


def test_verify_pd_small_run_passes():
    assert all(r.passed for r in verify_pd(DiscreteDist.uniform(3), 800, 3000, [(2,), (2, 3)], seed=1))


def test_verify_clt_report_shape():
    rep = verify_clt(DiscreteDist.uniform(2), [100, 1000], 400, seed=1)
    assert set(rep.details["checks"]) == {"mean_ratio", "var_ratio", "skew_trend", "ks"}
    assert [row["n"] for row in rep.details["grid"]] == [100, 1000]
