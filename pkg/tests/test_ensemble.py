"""Monte Carlo drivers: determinism, statistics, convergence estimators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sulfsim import ensemble, lamperti, lsst, pearson
from sulfsim.ensemble import (
    assert_bounds,
    field_statistics,
    fit_order,
    ks_invariant,
    nearest_rank,
    orders_from_diff_norms,
    pairwise_diff_norms,
    rmsd,
    run_ensemble,
    spatial_accuracy,
    strong_errors,
)
from sulfsim.errors import (
    GridMismatch,
    GridsNotNested,
    InsufficientPaths,
    ParameterError,
    StabilityViolated,
)
from sulfsim.heat import Grid1D
from sulfsim.sulphation import Diagnostics, solve_system


@pytest.fixture(scope="module")
def ens_grid():
    # dbar = 0.2; admissible dt for lambda = 1, dx = 0.1 is 4.73e-3
    return Grid1D(1.0, 0.1, 0.1, 2e-3)


def test_fit_order_recovers_exact_power_law():
    deltas = np.array([1e-4, 2e-4, 4e-4, 8e-4])
    errors = 3.7 * deltas**1.25
    q, c = fit_order(deltas, errors)
    assert q == pytest.approx(1.25, rel=1e-12)
    assert c == pytest.approx(3.7, rel=1e-10)


def test_strong_errors_rejects_few_paths(params_sigma1, coeffs_sigma1):
    with pytest.raises(InsufficientPaths):
        strong_errors(params_sigma1, coeffs_sigma1, n_paths=99)


def test_strong_errors_rejects_deterministic(params_det, coeffs_det):
    with pytest.raises(ParameterError):
        strong_errors(params_det, coeffs_det, n_paths=200)


def test_strong_errors_rejects_bad_ratios(params_sigma1, coeffs_sigma1):
    with pytest.raises(ValueError):
        strong_errors(params_sigma1, coeffs_sigma1, delta_ref=2.0**-10,
                      ratios=(3,), n_paths=100)  # 3 does not divide 1024
    with pytest.raises(ValueError):
        strong_errors(params_sigma1, coeffs_sigma1, delta_ref=3e-4, n_paths=100)


def test_strong_errors_small_run(params_sigma1, coeffs_sigma1):
    study = strong_errors(params_sigma1, coeffs_sigma1, delta_ref=2.0**-10,
                          ratios=(4, 8, 16), n_paths=100, seed=7, chunk_size=40)
    assert study.errors_final.shape == (3,)
    assert np.all(study.errors_final > 0.0)
    assert np.all(np.diff(study.errors_final) > 0.0)  # larger step, larger error
    assert np.all(study.errors_uniform >= study.errors_final - 1e-15)
    assert 0.4 < study.slope_final < 1.6


def test_strong_errors_thread_invariance(params_sigma1, coeffs_sigma1):
    kw = dict(delta_ref=2.0**-9, ratios=(4, 8), n_paths=120, seed=3, chunk_size=30)
    a = strong_errors(params_sigma1, coeffs_sigma1, threads=1, **kw)
    b = strong_errors(params_sigma1, coeffs_sigma1, threads=3, **kw)
    assert np.array_equal(a.errors_final, b.errors_final)
    assert np.array_equal(a.errors_uniform, b.errors_uniform)
    assert a.slope_final == b.slope_final


def test_pairwise_diff_norms_hand_computed():
    coarse = np.array([1.0, 2.0, 3.0])
    mid = np.array([1.0, 0.0, 2.0, 0.0, 3.0])
    fine = np.zeros(9)
    dxs = (0.5, 0.25, 0.125)
    norms = pairwise_diff_norms([coarse, mid, fine], dxs)
    assert norms[0] == 0.0  # mid restricted to coarse nodes equals coarse
    want = np.sqrt(0.25 * np.sum(mid**2))
    assert norms[1] == pytest.approx(want, rel=1e-14)


def test_orders_from_diff_norms():
    assert np.allclose(orders_from_diff_norms([4.0, 2.0, 1.0]), [1.0, 1.0])
    assert np.allclose(orders_from_diff_norms([9.0, 3.0]), [np.log2(3.0)])


def test_spatial_accuracy_rejects_bad_ladders(params_sigma1, coeffs_sigma1,
                                              material_default):
    with pytest.raises(GridsNotNested):
        spatial_accuracy(params_sigma1, coeffs_sigma1, material_default,
                         dxs=(0.125, 0.0625))
    with pytest.raises(GridsNotNested):
        spatial_accuracy(params_sigma1, coeffs_sigma1, material_default,
                         dxs=(0.12, 0.05, 0.03))


def test_spatial_accuracy_small_run(params_sigma1, coeffs_sigma1, material_default):
    study = spatial_accuracy(params_sigma1, coeffs_sigma1, material_default,
                             x_max=1.0, t_final=0.125, dt=2.0**-12,
                             dxs=(0.25, 0.125, 0.0625), seeds=(1, 2))
    assert study.p_rho.shape == (2, 1)
    assert study.diff_norms_rho.shape == (2, 2)
    assert np.all(study.diff_norms_rho > 0.0)
    assert np.all(study.p_rho > 0.0)
    assert np.all(study.p_c > 0.0)


def test_nearest_rank_quartiles():
    srt = np.array([1.0, 2.0, 3.0, 4.0])
    assert nearest_rank(srt, 0.25) == 1.0
    assert nearest_rank(srt, 0.50) == 2.0
    assert nearest_rank(srt, 0.75) == 3.0
    assert nearest_rank(srt, 1.00) == 4.0
    assert nearest_rank(srt, 1e-9) == 1.0


def test_field_statistics_two_values():
    stats = field_statistics(np.array([[0.0], [2.0]]))
    assert stats.mean[0] == 1.0
    assert stats.std[0] == pytest.approx(np.sqrt(2.0), rel=1e-15)
    assert stats.p25[0] == 0.0
    assert stats.p50[0] == 0.0
    assert stats.p75[0] == 2.0
    assert stats.n_paths == 2


def test_field_statistics_rejects_single_path():
    with pytest.raises(ValueError):
        field_statistics(np.zeros((1, 4)))


def test_field_statistics_requires_quantity_for_fields():
    with pytest.raises(ValueError):
        field_statistics([object(), object()])


@given(arrays(np.float64, (7, 5), elements=st.floats(-50, 50)))
@settings(max_examples=80, deadline=None)
def test_percentiles_are_monotone(samples):
    stats = field_statistics(samples)
    assert np.all(stats.p25 <= stats.p50)
    assert np.all(stats.p50 <= stats.p75)
    assert np.all(stats.p25 >= samples.min(axis=0))
    assert np.all(stats.p75 <= samples.max(axis=0))


def test_running_moments_match_direct(ens_grid):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 6, 4))
    mom = ensemble._RunningMoments()
    for lo in range(0, 50, 7):
        mom.add_chunk(x[lo:lo + 7])
    assert np.allclose(mom.mean, x.mean(axis=0), rtol=1e-13, atol=1e-13)
    assert np.allclose(mom.std(), x.std(axis=0, ddof=1), rtol=1e-12, atol=1e-13)


def test_assert_bounds_passes_clean_diag(material_default):
    d = Diagnostics(s_min=np.array([0.0]), s_max=np.array([1.0]),
                    c_min=np.array([5.0]), c_max=np.array([10.0]),
                    u_min=np.array([0.0]), u_max=np.array([1.0]),
                    c_increase_max=np.array([0.0]), nonfinite=np.array([False]))
    assert_bounds(d, material_default)


@pytest.mark.parametrize("field,value", [
    ("s_min", -1e-3), ("s_max", 15.5), ("c_min", -1e-3), ("c_max", 10.5),
    ("c_increase_max", 1e-3),
])
def test_assert_bounds_rejects_violations(material_default, field, value):
    base = dict(s_min=np.array([0.0]), s_max=np.array([1.0]),
                c_min=np.array([5.0]), c_max=np.array([10.0]),
                u_min=np.array([0.0]), u_max=np.array([1.0]),
                c_increase_max=np.array([0.0]), nonfinite=np.array([False]))
    base[field] = np.array([value])
    with pytest.raises(StabilityViolated):
        assert_bounds(Diagnostics(**base), material_default)


def test_run_ensemble_thread_and_chunk_invariance(params_sigma1, coeffs_sigma1,
                                                  ens_grid, material_default):
    kw = dict(n_paths=8, seed=13, time_stride=10, chunk_size=3)
    a = run_ensemble(params_sigma1, coeffs_sigma1, ens_grid, material_default,
                     threads=1, **kw)
    b = run_ensemble(params_sigma1, coeffs_sigma1, ens_grid, material_default,
                     threads=3, **kw)
    for q in ("s", "c", "rho"):
        assert np.array_equal(a.stats[q].mean, b.stats[q].mean)
        assert np.array_equal(a.stats[q].std, b.stats[q].std)
        assert np.array_equal(a.samples[q], b.samples[q])
    # chunk size must not matter either
    c = run_ensemble(params_sigma1, coeffs_sigma1, ens_grid, material_default,
                     n_paths=8, seed=13, time_stride=10, chunk_size=8)
    assert np.array_equal(a.samples["s"], c.samples["s"])
    assert np.allclose(a.stats["s"].mean, c.stats["s"].mean, rtol=1e-13)
    assert np.allclose(a.stats["s"].std, c.stats["s"].std, rtol=5e-11, atol=1e-13)


def test_run_ensemble_stats_match_retained_samples(params_sigma1, coeffs_sigma1,
                                                   ens_grid, material_default):
    res = run_ensemble(params_sigma1, coeffs_sigma1, ens_grid, material_default,
                       n_paths=6, seed=4, time_stride=25, chunk_size=2)
    s = res.samples["s"]
    assert s.shape[0] == 6
    assert np.allclose(res.stats["s"].mean, s.mean(axis=0), rtol=1e-12, atol=1e-14)
    assert np.allclose(res.stats["s"].std, s.std(axis=0, ddof=1), rtol=1e-10, atol=1e-14)
    srt = np.sort(s, axis=0)
    assert np.array_equal(res.stats["s"].p50, nearest_rank(srt, 0.50))
    assert res.times.shape == (ens_grid.n_steps // 25 + 1,)


def test_run_ensemble_validates_arguments(params_sigma1, coeffs_sigma1,
                                          ens_grid, material_default):
    with pytest.raises(ValueError):
        run_ensemble(params_sigma1, coeffs_sigma1, ens_grid, material_default,
                     n_paths=1, seed=0)
    with pytest.raises(ValueError):
        run_ensemble(params_sigma1, coeffs_sigma1, ens_grid, material_default,
                     n_paths=4, seed=0, quantities=("s", "bogus"))


def test_run_ensemble_deterministic_collapses(params_det, coeffs_det,
                                              ens_grid, material_default):
    res = run_ensemble(params_det, coeffs_det, ens_grid, material_default,
                       n_paths=4, seed=0, time_stride=10)
    for q in ("s", "c", "rho"):
        assert np.all(res.stats[q].std == 0.0)
        assert np.array_equal(res.samples[q][0], res.samples[q][3])


def test_rmsd_zero_against_self(params_det, coeffs_det, ens_grid, material_default):
    res = run_ensemble(params_det, coeffs_det, ens_grid, material_default,
                       n_paths=2, seed=0, time_stride=10)
    path = lsst.sample_path(params_det, coeffs_det, ens_grid.t_max,
                            ens_grid.n_steps, seed=None)
    base = solve_system(ens_grid, material_default, path, time_stride=10)
    out = rmsd(res, base)
    assert set(out) == {"s", "c", "rho"}
    for q in out:
        assert np.max(out[q]) == 0.0


def test_rmsd_grid_mismatch(params_det, coeffs_det, ens_grid, material_default):
    res = run_ensemble(params_det, coeffs_det, ens_grid, material_default,
                       n_paths=2, seed=0, time_stride=10)
    path = lsst.sample_path(params_det, coeffs_det, ens_grid.t_max,
                            ens_grid.n_steps, seed=None)
    base = solve_system(ens_grid, material_default, path, time_stride=5)
    with pytest.raises(GridMismatch):
        rmsd(res, base)


def test_rmsd_unknown_quantity(params_det, coeffs_det, ens_grid, material_default):
    res = run_ensemble(params_det, coeffs_det, ens_grid, material_default,
                       n_paths=2, seed=0, time_stride=10, quantities=("s",))
    path = lsst.sample_path(params_det, coeffs_det, ens_grid.t_max,
                            ens_grid.n_steps, seed=None)
    base = solve_system(ens_grid, material_default, path, time_stride=10)
    with pytest.raises(ValueError):
        rmsd(res, base, quantities=("c",))


def test_ks_invariant_rejects_deterministic(params_det, coeffs_det):
    with pytest.raises(ParameterError):
        ks_invariant(params_det, coeffs_det, n_paths=4)


def test_ks_invariant_rejects_empty_window(params_sigma1, coeffs_sigma1):
    with pytest.raises(ValueError):
        ks_invariant(params_sigma1, coeffs_sigma1, n_paths=4, t_final=1.0,
                     n_steps=100, burn_in=2.0)


def test_ks_invariant_small_run(params_sigma1, coeffs_sigma1):
    res = ks_invariant(params_sigma1, coeffs_sigma1, n_paths=40, t_final=3.0,
                       n_steps=3000, burn_in=1.5, sample_stride=100, seed=5)
    # 16 sampling times per path survive the burn-in
    assert res.n_samples == 40 * 16
    assert res.n_paths == 40
    assert 0.0 < res.statistic < 0.2


def test_ks_invariant_thread_invariance(params_sigma1, coeffs_sigma1):
    kw = dict(n_paths=30, t_final=2.0, n_steps=1000, burn_in=1.0,
              sample_stride=100, seed=6, chunk_size=8)
    a = ks_invariant(params_sigma1, coeffs_sigma1, threads=1, **kw)
    b = ks_invariant(params_sigma1, coeffs_sigma1, threads=4, **kw)
    assert a.statistic == b.statistic
