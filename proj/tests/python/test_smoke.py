import math

import numpy as np
import pytest

import nrc


def test_design_point():
    d = nrc.solve_design_point(0.5)
    assert abs(d.beta_star - 0.0915) / 0.0915 < 0.05
    assert nrc.solve_hb(d.beta_star).amplitude == pytest.approx(0.5, rel=1e-7)


def test_describing_fn_and_plant():
    n = nrc.describing_fn(2.0, 8.0, 0.1)
    assert abs(n) == pytest.approx(4 / (2 * math.pi) * math.sin(0.4))
    assert np.angle(n) == pytest.approx((math.pi - 0.8) / 2)
    assert nrc.freq_response(0.0) == pytest.approx(15 / 64)


def test_amplitude_curve_monotone():
    curve = nrc.amplitude_curve([0.05, 0.10, 0.15])
    amps = [s.amplitude for s in curve]
    assert amps == sorted(amps)


def test_closed_loop_trace():
    p = nrc.PlantParams()
    tr = nrc.run_closed_loop(p, nrc.AdaptiveParams(0.0075, 0.2), 0.5,
                             horizon=100 * p.natural_period(), sample_stride=10)
    assert tr.t.shape == tr.y.shape
    assert set(np.unique(tr.u)) <= {-1.0, 0.0, 1.0}
    assert len(tr.burst_widths) > 100
    obj = nrc.measure_objectives(tr, 0.5, nrc.solve_design_point(0.5).omega_star)
    assert obj.ultimate_amplitude_error < 0.1


def test_slow_model():
    v = nrc.classify(nrc.SlowGains(0.1, 0.5, 0.04))
    assert v.regime == nrc.SlowRegime.STABLE_FIXED_POINT
    assert v.fixed_point == pytest.approx(-0.12)
    assert v.ultimate_bound is None
    assert nrc.step_error(1.0, nrc.SlowGains(0.02, 0.5, 0.1)) == pytest.approx(0.38)


def test_robust_tuning():
    r = nrc.tune(0.5, interval=nrc.UncertaintyInterval(0.0732, 0.2288), c=0.2)
    iv = nrc.UncertaintyInterval(r.beta_low, r.beta_high)
    assert r.gamma_opt == nrc.gamma_opt(iv, 0.2, r.omega_star)
    assert r.predicted_cost == nrc.worst_case(r.gamma_opt, iv, 0.2, r.omega_star).value
    value, branch = nrc.cost(0.0, 0.1, 0.2, 7.7)
    assert value == 0.1 and branch == nrc.CostBranch.STABLE


def test_errors_raise():
    with pytest.raises(nrc.Error):
        nrc.solve_design_point(5.0)
    with pytest.raises(ValueError):
        nrc.PlantParams(xi=2.0)
