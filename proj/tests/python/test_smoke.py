import math

import pytest

import ghostsnr as gs


def fig_params(I, x):
    return gs.NormalizedParams(I=I, omegaB_T0=x, rho0sq_over_A1=10, AT_prime_over_rho0sq=1e4, eta=0.9)


def test_thermal_narrowband_point():
    r = gs.snr(gs.Formula.THERMAL_NB, fig_params(100, 10))
    assert r["snr_normalized"] == pytest.approx(2.506e-4, rel=2e-4)
    assert r["dominant_term"] == "excess"
    assert sum(r["noise_terms"].values()) == pytest.approx(3989.9, abs=0.1)


def test_formula_selection_and_hump():
    f = gs.select_formula(gs.SourceKind.QUANTUM_PS, gs.FieldRegime.NEAR, gs.classify_band(1e-2))
    assert f == gs.Formula.QUANTUM_BB_NEAR
    opt = gs.optimal_brightness(f, fig_params(1.0, 1e-2))
    assert not opt["monotone"]
    assert 3e-3 <= opt["I_opt"] <= 3e-2


def desk(kind):
    m = gs.PlaneModel()
    m.kind = kind
    m.I = 10.0
    m.omegaB_T0 = 10.0
    m.pinhole_area = 0.1
    m.eta = 0.9
    w = math.sqrt(4 * 25 / math.pi)
    m.mask = gs.MaskSpec.gaussian_spot(w)
    m.envelope_radius = 3 * w
    return m


def test_oracle_and_simulator():
    m = desk(gs.SourceKind.THERMAL)
    o = gs.oracle_snr(m, 1000.0)
    assert o["variance"] > 0
    assert o["term_ledger"]["background"] == 0.0
    e = gs.mc_snr(m, 1000.0, trials=100, seed=3)
    assert abs(e["snr"] - o["snr"]) < 4 * e["std_error"]


def test_quantum_simulation_rejected():
    with pytest.raises(gs.UnsupportedState, match="no proper P representation"):
        gs.mc_snr(desk(gs.SourceKind.QUANTUM_PS), 1000.0, trials=100)


def test_acquisition_broadband():
    r = gs.acquisition_ratio(gs.Formula.THERMAL_BB, gs.Formula.QUANTUM_BB_NEAR, fig_params(1e4, 1e-2),
                             fig_params(1e-3, 1e-2))
    assert r["comparison"] == "broadband"
    assert r["ratio"] * 0.81 == pytest.approx(0.01, rel=0.02)
