import numpy as np
import pytest

from ctxfilter.bench import bench_scaling, fit_scaling
from ctxfilter.core import FilterConfig


def test_fit_scaling_exact_line():
    fit = fit_scaling([1000, 2000, 4000, 8000], [1e-3, 2e-3, 4e-3, 8e-3])
    assert fit["slope_s_per_word"] == pytest.approx(1e-6)
    assert fit["loglog_exponent"] == pytest.approx(1.0)


def test_bench_rows_and_fit():
    r = bench_scaling([0, 200, 400], warmup=1, iterations=3)
    assert [row["list_size"] for row in r.rows] == [0, 200, 400]
    assert r.rows[0]["survivors"] == 0
    assert r.window_frames == 530
    assert {"slope_s_per_word", "intercept_s", "loglog_exponent"} <= set(r.fit)
    d = r.to_dict()
    assert d["machine"]["numpy"] == np.__version__


def test_size_zero_is_near_free():
    r = bench_scaling([0], warmup=1, iterations=5)
    assert r.rows[0]["median_ms"] < 1.0


def test_threaded_mode_same_survivors():
    a = bench_scaling([300], warmup=1, iterations=2)
    b = bench_scaling([300], warmup=1, iterations=2, threads=3)
    assert a.rows[0]["survivors"] == b.rows[0]["survivors"]
    assert b.threads == 3


def test_stage_one_doubling_is_roughly_linear():
    # unreachable PSC threshold: only stage 1 runs
    cfg = FilterConfig(psc_threshold=1.01)
    r = bench_scaling([20000, 40000], config=cfg, warmup=3, iterations=15)
    ratio = r.rows[1]["median_ms"] / r.rows[0]["median_ms"]
    assert 1.3 < ratio < 3.0
    assert r.rows[1]["survivors"] == 0


def test_bad_arguments():
    with pytest.raises(ValueError):
        bench_scaling([10], warmup=0)
    with pytest.raises(ValueError):
        bench_scaling([-1])
