import math

import numpy as np
import pytest

import jamdet


def step_window():
    return np.array([[-1.0, 1.0, -1.0, 1.0, -10.0, 10.0, -10.0, 10.0]])


def test_version():
    assert jamdet.__version__ == "0.1.0"


def test_scatter_matches_numpy():
    rng = np.random.default_rng(1)
    z = rng.normal(size=(2, 30))
    s = jamdet.scatter(z, 12)
    first = z[:, :12] - z[:, :12].mean(axis=1, keepdims=True)
    np.testing.assert_allclose(s["scatter_1"], first @ first.T, rtol=1e-12)
    np.testing.assert_allclose(s["mean_all"], z.mean(axis=1), rtol=1e-12)
    assert s["valid"]


def test_logdet_and_loglike():
    assert jamdet.logdet_pd(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(math.log(3.0))
    ll = jamdet.gaussian_loglike(np.array([[0.0]]), np.array([0.0]), np.array([[1.0]]))
    assert ll == pytest.approx(-0.918939, abs=1e-6)
    with pytest.raises(jamdet.SingularMatrixError):
        jamdet.logdet_pd(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_mncd_step_window():
    r = jamdet.mncd_statistic(step_window(), grid_stride=1)
    assert r.statistic == pytest.approx(-2 * math.log(100) + 4 * math.log(50.5), abs=1e-12)
    assert r.argmax_split == 4


def test_detectors_are_nonnegative_and_affine_invariant():
    rng = np.random.default_rng(2)
    t = np.array([[2.0, 0.5], [-1.0, 1.5]])
    for _ in range(20):
        z = rng.normal(size=(2, 64))
        mapped = t @ z + np.array([[-100.0], [20.0]])
        for fn in (jamdet.ncd_statistic, jamdet.mncd_statistic, jamdet.spd_statistic):
            a = fn(z).statistic
            assert a >= -1e-9
            assert fn(mapped).statistic == pytest.approx(a, rel=1e-8, abs=1e-8)


def test_evaluate_and_threshold():
    det = jamdet.Detector("ncd", "strict")
    assert det.name == "ncd" and det.variant == "strict"
    report = jamdet.evaluate(det, step_window(), 1)
    assert not jamdet.apply_threshold(report, report.statistic).detected
    assert jamdet.apply_threshold(report, report.statistic - 1.0).detected
    with pytest.raises(jamdet.InvalidArgumentError):
        jamdet.Detector("cusum")


def test_m_of_n():
    out = jamdet.integrate_m_of_n([0, 1, 0, 1, 0, 1], 2, 3)
    assert list(out) == [0, 0, 0, 1, 0, 1]
    assert list(jamdet.integrate_m_of_n([1] * 6, 3, 5)) == [1] * 6


def test_threshold_estimation():
    est = jamdet.threshold_from_statistics(list(range(1, 101)), 0.01)
    assert est.threshold == 99.0
    assert est.empirical_pfa == pytest.approx(0.01)
    rng = np.random.default_rng(3)
    windows = [rng.normal(size=(1, 40)) for _ in range(200)]
    est = jamdet.estimate_threshold(jamdet.Detector(), windows, 0.05)
    assert est.num_windows_used == 200
    assert est.empirical_pfa <= 0.05
    with pytest.raises(jamdet.InsufficientDataError):
        jamdet.estimate_threshold(jamdet.Detector(), windows[:10], 0.05)


def test_generate_save_load_decimate(tmp_path):
    rec = jamdet.generate({"preset": "bnlj", "total_samples": 500}, seed=7, record_id="b0")
    assert len(rec) == 500
    assert rec.values.shape == (2, 500)
    assert rec.ground_truth_change == 200
    assert jamdet.scenario_of(rec)["kind"] == "bnlj"
    again = jamdet.generate({"preset": "bnlj", "total_samples": 500}, seed=7)
    np.testing.assert_array_equal(rec.values, again.values)

    path = tmp_path / "b0.csv"
    jamdet.save_trace(rec, path)
    back = jamdet.load_trace(path)
    np.testing.assert_array_equal(back.values, rec.values)
    assert back.layout == rec.layout

    dec = jamdet.decimate(rec, 10)
    assert len(dec) == 50
    assert dec.ground_truth_change == 20
    np.testing.assert_array_equal(dec.values, rec.values[:, ::10])


def test_errors_map_to_python_exceptions(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("sample_index,snr_db\n0,1\n1,nan\n")
    with pytest.raises(jamdet.ParseError):
        jamdet.load_trace(bad)
    with pytest.raises(jamdet.ConfigError):
        jamdet.generate({"preset": "laser"}, seed=1)
    assert issubclass(jamdet.ParseError, jamdet.Error)
