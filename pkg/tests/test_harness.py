import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sumcomp.errors import ConfigError
from sumcomp.harness import (
    ExperimentConfig,
    TrialStats,
    aircomp_amplitude,
    batch_sizes,
    check_table,
    error_model,
    merge_all,
    run_analytic_table,
    run_mae_sweep,
    run_mse_sweep,
    run_nmse_compare,
    run_overlap_demo,
)
from sumcomp.codec import preset_code, gray_pam4_baseline

from oracles import collisions_brute

INF = math.inf


@given(st.lists(st.integers(-10 ** 4, 10 ** 4), min_size=2, max_size=300), st.data())
def test_trialstats_merge_exact_for_integers(errs, data):
    e = np.array(errs, dtype=np.int64)
    cut = sorted(data.draw(st.lists(st.integers(0, len(e)), max_size=4)))
    parts = np.split(e, cut)
    merged = merge_all(TrialStats.from_errors(p) for p in parts)
    whole = TrialStats.from_errors(e)
    assert merged == whole


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=300), st.integers(1, 299))
def test_trialstats_merge_real(errs, cut):
    e = np.array(errs)
    cut = min(cut, len(e))
    merged = TrialStats.from_errors(e[:cut]).merge(TrialStats.from_errors(e[cut:]))
    whole = TrialStats.from_errors(e)
    for f in ("sum_sq_err", "sum_sq_err2", "sum_abs_err"):
        a, b = getattr(merged, f), getattr(whole, f)
        assert abs(a - b) <= 1e-10 * max(abs(b), 1e-300) + 1e-300


def test_trialstats_stderr():
    rng = np.random.default_rng(0)
    e = rng.normal(size=1000)
    st_ = TrialStats.from_errors(e, truth=np.full(1000, 2.0))
    assert st_.mse == pytest.approx(np.mean(e ** 2))
    assert st_.mse_stderr == pytest.approx(np.std(e ** 2, ddof=1) / math.sqrt(1000))
    assert st_.mae_stderr == pytest.approx(np.std(np.abs(e), ddof=1) / math.sqrt(1000))
    assert st_.nmse == pytest.approx(np.mean(e ** 2 / 2))


def test_batch_sizes():
    assert batch_sizes(12000) == [5000, 5000, 2000]
    assert sum(batch_sizes(50000)) == 50000


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("bogus").resolved()
    with pytest.raises(ConfigError):
        ExperimentConfig("mse-sweep", trials=0).resolved()
    with pytest.raises(ConfigError):
        ExperimentConfig("mse-sweep", snr_grid=()).resolved()
    with pytest.raises(ConfigError):
        ExperimentConfig("mae-sweep", function="geometric_mean").resolved()
    with pytest.raises(ConfigError):
        ExperimentConfig("mse-sweep", preset="qam15").resolved()
    with pytest.raises(ConfigError):
        ExperimentConfig("mse-sweep", preset="qam16", q=64).resolved()
    cfg = ExperimentConfig("nmse-compare", function="geometric_mean").resolved()
    assert (cfg.preset, cfg.K) == ("pam8", 4)


def test_error_model_axes():
    pam = preset_code("pam16", True)
    inp = error_model(pam, 100, 1.0)
    assert (inp.M1, inp.M2) == (None, 1)
    inp = error_model(pam, 100, 1.0, aggregate=True)
    assert (inp.M1, inp.M2) == (1501, 1)
    assert error_model(preset_code("qam64"), 100, 1.0, aggregate=True).M1 == 701


def test_noiseless_rows_are_exact():
    t = run_mse_sweep(ExperimentConfig("mse-sweep", snr_grid=(INF,), trials=3000))
    assert t.rows[0][1] == 0 and t.rows[0][2] == 0
    t = run_mae_sweep(ExperimentConfig("mae-sweep", snr_grid=(INF,), trials=3000))
    assert t.rows[0][1] == 0
    t = run_mae_sweep(ExperimentConfig("mae-sweep", function="euclidean_norm", snr_grid=(INF,), trials=3000))
    assert t.rows[0][1] < 1e-12
    t = run_nmse_compare(ExperimentConfig("nmse-compare", snr_grid=(INF,), trials=3000))
    assert t.rows[0][1] == 0 and t.rows[0][3] == 0
    assert t.rows[0][2] < 1e-20  # analog path: float round-off only
    t = run_nmse_compare(ExperimentConfig("nmse-compare", function="geometric_mean", snr_grid=(INF,), trials=3000))
    # only the quantization floor of the log-domain levels remains
    assert max(t.rows[0][1:4]) < 0.05
    assert t.rows[0][4] is None


def test_mse_sweep_rows_sorted_and_formatted():
    t = run_mse_sweep(ExperimentConfig("mse-sweep", snr_grid=(5.0, -3.0, 0.5), trials=200))
    assert t.column("snr_db") == [-3.0, 0.5, 5.0]
    lines = t.to_csv().splitlines()
    assert lines[0] == "snr_db,mse_empirical,mse_analytic,stderr,mse_analytic_grid"
    assert lines[2].startswith("0.5,")
    assert all(len(v.split("e")[0].replace("-", "").replace(".", "")) <= 9 for v in lines[1].split(","))


def test_aircomp_equal_energy():
    code = preset_code("qam64", True)
    A = aircomp_amplitude(code)
    levels = A * (np.arange(64) - 31.5)
    assert np.mean(levels ** 2) == pytest.approx(np.mean(np.abs(code.symbol_array) ** 2))


def test_overlap_demo_matches_brute_force():
    t = run_overlap_demo()
    assert t.meta["gray_pam4_collisions"] == len(collisions_brute(lambda s: gray_pam4_baseline(s, 2.0)))
    assert t.meta["sumcomp_pam4_collisions"] == 0
    assert check_table("overlap-demo", t) == []


def test_analytic_table():
    cfg = ExperimentConfig("analytic-table", preset="qam16", snr_grid=(INF, 0.0), k_list=(10, 20))
    t = run_analytic_table(cfg)
    assert t.to_csv() == run_analytic_table(cfg).to_csv()
    zero = [r for r in t.rows if r[1] == INF]
    assert all(r[3] == 0 and r[4] == 0 and r[5] == 0 for r in zero)
    enc = {r[0]: r[6] for r in t.rows}
    assert 1.9 <= enc[20] / enc[10] <= 2.1
    assert check_table("analytic-table", t) == []
    # q = 2 is outside the asymptotic regime: empty cells rather than an error
    t = run_analytic_table(ExperimentConfig("analytic-table", preset="pam2", snr_grid=(0.0,)))
    assert t.rows[0][6] is None and ",," in t.to_csv().splitlines()[1]


def test_workers_do_not_change_output():
    cfg = ExperimentConfig("mse-sweep", preset="hex8b", K=7, snr_grid=(-2.0, 4.0), trials=7000)
    one = run_mse_sweep(cfg).to_csv()
    two = run_mse_sweep(ExperimentConfig(**{**cfg.__dict__, "workers": 2})).to_csv()
    assert one == two


def test_check_mse_flags_large_deviation():
    t = run_mse_sweep(ExperimentConfig("mse-sweep", snr_grid=(0.0,), trials=2000))
    t.rows[0][1] = t.rows[0][2] * 2
    assert check_table("mse-sweep", t)
