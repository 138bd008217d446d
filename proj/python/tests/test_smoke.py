"""Smoke tests for the python bindings: one end-to-end identification at a
small scale, exercised entirely through the public module surface."""

import numpy as np
import pytest

import frfid


@pytest.fixture(scope="module")
def grid():
    return frfid.FrequencyGrid(fast_length=1024, factor=4, fast_dt=1.0 / 128.0)


def test_grid_properties(grid):
    assert grid.fast_length == 1024
    assert grid.slow_length == 256
    assert grid.factor == 4
    assert grid.hz(512) == pytest.approx(64.0)
    assert len(grid.hz_values()) == 1024


def test_multisine_is_deterministic_and_scaled(grid):
    bins = frfid.full_spectrum_bins(grid)
    x1, X1 = frfid.multisine(grid, bins, rms=0.5, seed=7)
    x2, _ = frfid.multisine(grid, bins, rms=0.5, seed=7)
    assert np.array_equal(x1, x2)
    assert np.sqrt(np.mean(x1**2)) == pytest.approx(0.5, rel=1e-12)
    mags = np.abs(X1[bins])
    assert np.allclose(mags, mags[0], rtol=1e-12)


def test_beyond_nyquist_identification():
    # longer record than the shared fixture so the polynomial bias stays small
    grid = frfid.FrequencyGrid(fast_length=2048, factor=4, fast_dt=1.0 / 128.0)
    plant = frfid.resonant_plant(grid.fast_dt)
    assert plant.is_stable()

    bins = frfid.full_spectrum_bins(grid)
    u, _ = frfid.multisine(grid, bins, rms=8.3e-3, seed=1)
    y = plant.simulate(u)
    y_slow = frfid.downsample(y, grid.factor)

    cfg = frfid.LpmConfig(poly_order=2, half_width=12, factor=4)
    assert cfg.violations(grid.slow_length) == []
    est = frfid.estimate_frf_lpm(np.fft.fft(u), np.fft.fft(y_slow), grid, cfg)

    truth = np.array([plant.response(grid.omega(k)) for k in range(grid.fast_length)])
    valid = est["flags"] == 0
    rel = np.abs(est["frf"][valid] - truth[valid]) / np.abs(truth[valid])
    assert np.max(rel) < 1e-2  # including bins above the 16 Hz slow Nyquist


def test_sparse_estimate_matches_plant(grid):
    plant = frfid.resonant_plant(grid.fast_dt)
    bins = frfid.sparse_multisine_bins(grid)
    u, U = frfid.multisine(grid, bins, rms=8.3e-3, seed=3)
    y = plant.simulate_steady_state(u)
    y_slow = frfid.downsample(y, grid.factor)

    est = frfid.estimate_sparse(U, np.fft.fft(y_slow), grid, bins)
    ok = est["flags"] == 0
    truth = np.array([plant.response(grid.omega(k)) for k in bins])
    rel = np.abs(est["frf"][ok] - truth[ok]) / np.abs(truth[ok])
    assert ok.sum() > 0
    assert np.max(rel) < 1e-6


def test_etfe_fails_above_slow_nyquist(grid):
    plant = frfid.resonant_plant(grid.fast_dt)
    bins = frfid.full_spectrum_bins(grid)
    u, U = frfid.multisine(grid, bins, rms=8.3e-3, seed=5)
    y_slow = frfid.downsample(plant.simulate(u), grid.factor)
    est = frfid.etfe_baseline(U, np.fft.fft(y_slow), grid)

    m = grid.slow_length
    high = np.arange(m // 2 + 1, grid.fast_length // 2)
    truth = np.array([plant.response(grid.omega(int(k))) for k in high])
    ok = est["flags"][high] == 0
    rel = np.abs(est["frf"][high][ok] - truth[ok]) / np.abs(truth[ok])
    assert np.median(rel) > 0.1


def test_identify_from_config(tmp_path, repo_root):
    out = tmp_path / "bundle"
    res = frfid.identify(str(repo_root / "configs" / "quick.ini"), str(out))
    assert (out / "frf_lpm.csv").exists()
    assert (out / "manifest.json").exists()
    assert len(res["input_fast"]) == 256
    assert len(res["lpm"]["frf"]) == 256
