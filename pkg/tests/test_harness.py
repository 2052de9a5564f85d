import csv
import io

import numpy as np

from stdperm.core import Permutation
from stdperm.dist import DiscreteDist
from stdperm.harness import cycle_stats, simulate, std_sampler, uniform_sampler
from stdperm.sampling import RngStream


def test_cycle_stats_against_direct_decomposition():
    rows = uniform_sampler()(60, 25, RngStream(1, 0))
    st = cycle_stats(rows, k_max=4, ts=(2, 3))
    for r in range(60):
        lengths = sorted((len(c) for c in Permutation(tuple(rows[r] + 1)).cycles()), reverse=True)
        assert st.K[r] == len(lengths)
        assert st.c[r].tolist() == [lengths.count(k) for k in range(1, 5)]
        assert st.lam[r].tolist() == (lengths + [0] * 5)[:5]
        for t in (2, 3):
            assert np.isclose(st.m[t][r], sum((l / 25) ** t for l in lengths))


def test_identity_and_empty_rows():
    st = cycle_stats(np.tile(np.arange(6), (3, 1)))
    assert st.K.tolist() == [6, 6, 6] and st.c[:, 0].tolist() == [6, 6, 6]
    assert cycle_stats(np.zeros((2, 0), int)).K.tolist() == [0, 0]


def test_simulate_reproducible_and_stream_ordered():
    sampler = std_sampler(DiscreteDist.uniform(3))
    a = simulate(sampler, 50, 40, seed=3, streams=4)
    b = simulate(sampler, 50, 40, seed=3, streams=4, threads=2)
    assert (a.K == b.K).all() and (a.lam == b.lam).all()
    # the first stream's block is what stream 0 alone produces
    solo = simulate(sampler, 50, 10, seed=3, streams=1)
    assert (a.K[:10] == solo.K).all()


def test_chunking_does_not_change_results(monkeypatch):
    import stdperm.harness as h

    sampler = uniform_sampler()
    full = simulate(sampler, 30, 25, seed=2)
    monkeypatch.setattr(h, "CHUNK_ENTRIES", 30 * 4)
    assert (simulate(sampler, 30, 25, seed=2).K == full.K).all()


def test_csv_layout():
    st = simulate(uniform_sampler(), 10, 3, seed=1, k_max=2)
    buf = io.StringIO()
    st.write_csv(buf)
    assert buf.getvalue().endswith("\r\n")
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["rep", "n", "K", "c1", "c2", "lambda1", "lambda2", "lambda3",
                       "lambda4", "lambda5", "m2", "m3"]
    assert len(rows) == 4 and rows[1][:2] == ["0", "10"]
