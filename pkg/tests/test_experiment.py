import csv
import io
import math

import numpy as np
import pytest

from lossy_optics.experiment import (CountsModel, ScanConfig, crossing_loss, device_unitary,
                                     expected_counts,
                                     run_scan, scan_visibilities, synthesize_counts,
                                     theta_for_loss, visibility, write_scan_csv)
from lossy_optics.fock import oracle_coincidence
from lossy_optics.quantum import PhotonPairSource, p12_closed, p13_closed

TAUS = np.linspace(-2, 2, 81)


def scan(losses, observable="P12", xi=1.0, **kw):
    cfg = ScanConfig(losses=losses, tau_grid=TAUS, observable=observable,
                     source=PhotonPairSource(visibility=xi), **kw)
    return run_scan(cfg)


def test_default_tau_grid():
    cfg = ScanConfig(losses=[0.0])
    assert len(cfg.tau_grid) == 81
    assert cfg.tau_grid[0] == -2.0 and cfg.tau_grid[-1] == 2.0 and cfg.tau_grid[40] == 0.0
    assert cfg.source.coherence_time == 1.0


def test_zero_loss_dip_curve():
    res = scan([0.0])
    np.testing.assert_allclose(res.values[0], 0.5 * (1 - np.exp(-TAUS ** 2)), atol=1e-15)


def test_full_loss_peak_curve():
    res = scan([1.0])
    np.testing.assert_allclose(res.values[0], 0.125 * (1 + np.exp(-TAUS ** 2)), atol=1e-15)


def test_full_loss_channel_dip():
    res = scan([1.0], "P13")
    assert res.long_delay_baseline[0] == pytest.approx(0.25, abs=1e-15)
    assert res.zero_delay_value[0] == pytest.approx(0.0, abs=1e-15)
    assert res.values[0, 40] == pytest.approx(0.0, abs=1e-15)
    assert res.values[0, 0] == pytest.approx(0.25 * (1 - math.exp(-4)), abs=1e-15)


@pytest.mark.parametrize("observable", ["P12", "P13"])
@pytest.mark.parametrize("convention", ["amplitude", "power"])
def test_scan_reproduces_closed_forms_and_oracle(observable, convention):
    losses = [0.0, 0.07, 0.26, 0.5, 0.96, 1.0]
    cfg = ScanConfig(losses=losses, tau_grid=np.linspace(-2, 2, 9), observable=observable,
                     loss_convention=convention, source=PhotonPairSource(visibility=0.87))
    res = run_scan(cfg, verify=True)
    closed = p12_closed if observable == "P12" else p13_closed
    m = int(observable[2])
    for a, loss in enumerate(losses):
        theta = theta_for_loss(loss, convention)
        for b, g in enumerate(res.gammas):
            assert abs(res.values[a, b] - closed(theta, g)) < 1e-12
            assert abs(res.values[a, b] - oracle_coincidence(device_unitary(theta),
                                                              cfg.source, g, 1, m)) < 1e-12


def test_p23_and_map_observables():
    res = run_scan(ScanConfig(losses=[0.3], tau_grid=[0.0, 1.0], observable="P23"), verify=True)
    # The device is symmetric between outputs 1 and 2 as seen from the loss channel.
    assert res.values[0, 0] == pytest.approx(p13_closed(theta_for_loss(0.3), 1.0), abs=1e-14)
    res = run_scan(ScanConfig(losses=[0.3], tau_grid=[0.0, 1.0], observable="map"), verify=True)
    assert res.values.shape == (1, 2, 6)
    assert res.labels == ("P11", "P12", "P13", "P22", "P23", "P33")
    np.testing.assert_allclose(res.values.sum(axis=2), 1.0, atol=1e-12)
    rows = list(res.rows())
    assert len(rows) == 12 and rows[1][4] == "P12"


@pytest.mark.parametrize("kwargs", [dict(losses=[]), dict(losses=[1.5]), dict(losses=[-0.1]),
                                    dict(losses=[0.1], tau_grid=[]),
                                    dict(losses=[0.1], tau_grid=[1.0, 0.0]),
                                    dict(losses=[0.1], loss_convention="dB"),
                                    dict(losses=[0.1], observable="P14")])
def test_scan_config_validation(kwargs):
    with pytest.raises(ValueError):
        ScanConfig(**kwargs)


def test_closed_forms_require_ports_one_and_two():
    cfg = ScanConfig(losses=[0.1], source=PhotonPairSource(1, 3))
    with pytest.raises(ValueError):
        run_scan(cfg)


def test_visibility_metrics():
    assert visibility(0.0, 0.5, "dip") == 1.0
    assert visibility(0.25, 0.125, "peak") == 1.0
    assert visibility(0.25, 0.125, "michelson") == pytest.approx(1 / 3)
    with pytest.raises(ZeroDivisionError):
        visibility(0.1, 0.0, "dip")
    with pytest.raises(ZeroDivisionError):
        visibility(0.0, 0.0, "michelson")
    with pytest.raises(ValueError):
        visibility(0.1, 0.2, "contrast")


def test_visibility_recovers_source_visibility():
    xi = 0.87
    dip = scan([0.0], xi=xi)
    assert visibility(dip.zero_delay_value[0], dip.long_delay_baseline[0], "dip") == pytest.approx(xi, abs=1e-15)
    peak = scan([1.0], xi=xi)
    assert visibility(peak.zero_delay_value[0], peak.long_delay_baseline[0], "peak") == pytest.approx(xi, abs=1e-14)
    loss_channel = scan([1.0], "P13", xi=xi)
    assert visibility(loss_channel.zero_delay_value[0], loss_channel.long_delay_baseline[0],
                      "dip") == pytest.approx(xi, abs=1e-14)


@pytest.mark.parametrize("theta", np.linspace(0.1, math.pi / 2, 6))
def test_loss_channel_dip_visibility_formula(theta):
    xi = 0.87
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    vis = visibility(p13_closed(theta, xi), p13_closed(theta, 0.0), "dip")
    assert vis == pytest.approx(xi * s2 / (c2 + 1), abs=1e-14)


def test_scan_visibilities_handles_vanishing_baseline():
    res = scan([0.0, 1.0], "P13", xi=0.87)
    vis = scan_visibilities(res)
    assert vis[0] == {"dip": None, "peak": None, "michelson": None}
    assert vis[1]["dip"] == pytest.approx(0.87, abs=1e-14)


def bisect(f, lo, hi, tol=1e-13):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("xi", [1.0, 0.87, 0.3, 1e-3])
def test_crossing_loss_by_bisection(xi):
    def balance(loss):
        theta = theta_for_loss(loss)
        return p12_closed(theta, xi) - p12_closed(theta, 0.0)

    root = bisect(balance, 0.0, 1.0)
    assert crossing_loss(xi) == pytest.approx(root, abs=1e-10)
    assert crossing_loss(xi) == pytest.approx(2 - math.sqrt(2), abs=1e-15)


def test_crossing_loss_domain():
    for xi in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            crossing_loss(xi)


def test_inversion_with_loss():
    losses = np.linspace(0, 1, 41)
    res = scan(losses)
    assert np.all(np.diff(res.zero_delay_value) > 0)
    assert np.all(np.diff(res.long_delay_baseline) < 0)
    sign = np.sign(res.zero_delay_value - res.long_delay_baseline)
    flips = np.nonzero(np.diff(sign))[0]
    assert len(flips) == 1
    assert losses[flips[0]] < 2 - math.sqrt(2) < losses[flips[0] + 1]


def test_counts_trivial_cases():
    res = scan([0.0])
    zero_idx = 40
    counts = synthesize_counts(res, CountsModel(pair_rate=1e6, dark_coincidence_rate=0.0, rng_seed=1))
    assert counts[0, zero_idx] == 0
    a = synthesize_counts(res, CountsModel(rng_seed=7))
    b = synthesize_counts(res, CountsModel(rng_seed=7))
    assert np.array_equal(a, b)
    assert a.dtype == np.int64 and a.shape == (1, 81)


def test_counts_mean_follows_normalized_scan():
    res = scan([1.0])
    mean = expected_counts(res, CountsModel(pair_rate=100.0, integration_time=2.0,
                                            dark_coincidence_rate=3.0))
    np.testing.assert_allclose(mean[0], 200.0 * (1 + np.exp(-TAUS ** 2)) + 6.0, atol=1e-12)


def test_dark_counts_are_flat():
    res = scan(np.linspace(0, 1, 5))
    model = CountsModel(pair_rate=0.0, integration_time=10.0, dark_coincidence_rate=2.5, rng_seed=11)
    counts = synthesize_counts(res, model)
    mean = 25.0
    sigma = math.sqrt(mean / counts.size)
    assert abs(counts.mean() - mean) < 5 * sigma
    assert np.all(expected_counts(res, model) == mean)


def test_vanishing_baseline_gives_dark_counts_only():
    res = scan([0.0], "P13")
    mean = expected_counts(res, CountsModel(pair_rate=1000.0, dark_coincidence_rate=1.0))
    assert np.all(mean == 1.0)


def test_counts_model_validation():
    with pytest.raises(ValueError):
        CountsModel(pair_rate=-1.0)


def test_csv_layout():
    res = scan([0.0, 1.0])
    text = write_scan_csv(res)
    assert "\r" not in text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["loss", "tau_ps", "gamma", "value", "observable", "convention"]
    assert len(rows) == 1 + 2 * 81
    assert rows[1][4:] == ["P12", "amplitude"]
    assert float(rows[41][3]) == res.values[0, 40]

    counts = synthesize_counts(res, CountsModel(rng_seed=3))
    rows = list(csv.reader(io.StringIO(write_scan_csv(res, counts=counts, seed=3))))
    assert rows[0][-2:] == ["counts", "seed"]
    assert [int(r[6]) for r in rows[1:]] == counts.ravel().tolist()
    assert {r[7] for r in rows[1:]} == {"3"}
