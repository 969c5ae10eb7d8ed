import math

import pytest

import lqhedge as lq


def black_call(sigma, tau, s, k):
    sd = sigma * math.sqrt(tau)
    d1 = (math.log(s / k) + 0.5 * sd * sd) / sd
    n = lambda x: 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))
    return s * n(d1) - k * n(d1 - sd)


MOMENTS = lq.LevyMoments(-0.08, 0.4, 0.1 / math.sqrt(250.0), 5.0 / 250.0)


def test_black_price_matches_closed_form():
    assert lq.bs_price(0.4, 0.25, 100.0, 105.0) == pytest.approx(black_call(0.4, 0.25, 100.0, 105.0), rel=1e-12)


def test_payoff_inversion_recovers_call():
    c = lq.call_contract(100.0, 100.0, 0.25)
    for s in (80.0, 100.0, 125.0):
        assert lq.payoff(c, s) == pytest.approx(max(s - 100.0, 0.0), abs=1e-6)


@pytest.mark.parametrize("kind", [lq.ModelKind.JD, lq.ModelKind.NIG, lq.ModelKind.VG])
def test_calibration_round_trip(kind):
    model = lq.calibrate(kind, MOMENTS)
    got = model.moments()
    for name in ("mu", "sigma", "skew_rate", "exkurt_rate"):
        assert getattr(got, name) == pytest.approx(getattr(MOMENTS, name), rel=1e-10, abs=1e-14)


def test_kappa_at_zero_vanishes():
    model = lq.calibrate(lq.ModelKind.NIG, MOMENTS)
    assert abs(model.kappa(0.0)) < 1e-15


def test_black_scholes_model_hedges_perfectly():
    model = lq.calibrate(lq.ModelKind.BS, lq.LevyMoments(-0.08, 0.4))
    c = lq.call_contract(100.0, 100.0, 0.25)
    hs = lq.HedgeStructure(model, c)
    assert hs.v == pytest.approx(black_call(0.4, 0.25, 100.0, 100.0), rel=1e-9)
    assert abs(lq.vo_error(model, c)) < 1e-8


def test_error_ordering_and_approximation():
    c = lq.call_contract(100.0, 100.0, 0.25)
    model = lq.calibrate(lq.ModelKind.JD, MOMENTS)
    vo, pure, bs = lq.vo_error(model, c), lq.pure_error(model, c), lq.bs_hedge_error(model, c)
    assert 0.0 < vo <= pure + 1e-9
    assert pure <= bs + 1e-9
    a_vo, a_pure, a_bs = (lq.approx_vo_error(MOMENTS, c), lq.approx_pure_error(MOMENTS, c),
                          lq.approx_bs_error(MOMENTS, c))
    assert 0.0 < a_vo <= a_pure <= a_bs


def test_approx_breakdown_total():
    c = lq.call_contract(100.0, 95.0, 0.5)
    b = lq.approx_initial_capital(MOMENTS, c)
    assert b["total"] == pytest.approx(b["order0"] + b["order1"] + 0.5 * b["order2"], rel=1e-14)
    assert b["order0"] == pytest.approx(black_call(0.4, 0.5, 100.0, 95.0), rel=1e-9)


def test_monte_carlo_is_reproducible():
    c = lq.call_contract(100.0, 100.0, 1.0 / 12.0)
    model = lq.calibrate(lq.ModelKind.VG, MOMENTS)
    a = lq.run_hedge(model, c, "bs", paths=2000, steps_per_year=50, seed=7, threads=1)
    b = lq.run_hedge(model, c, "bs", paths=2000, steps_per_year=50, seed=7, threads=2)
    assert a.mse == b.mse
    assert a.paths_used == 2000


def test_errors_raise_typed_exceptions():
    with pytest.raises(lq.CalibrationError):
        lq.calibrate(lq.ModelKind.JD, lq.LevyMoments(0.0, 0.2, 0.5, 0.0))
    with pytest.raises(lq.Error):
        lq.build_table("nonsense")


def test_capital_table_csv():
    text = lq.build_table("capital", "exkurt = 2/250\nstrikes = 100\nmaturities = 1/4\n")
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    assert rows[0].startswith("exkurt_rate,K,T")
    assert len(rows) == 2
    cells = dict(zip(rows[0].split(","), rows[1].split(",")))
    assert float(cells["BS"]) == pytest.approx(black_call(0.4, 0.25, 100.0, 100.0), abs=5e-4)
