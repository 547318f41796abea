import math

import pytest

import optomech as om

TWO_PI = 2.0 * math.pi


def fig2_params():
    p = om.SystemParams()
    p.omega_m = TWO_PI * 78.226e6
    p.gamma_m = TWO_PI * 3.6e3
    p.kappa_ex = TWO_PI * 3.0e6
    p.kappa_0 = TWO_PI * 3.04e6
    p.g0 = TWO_PI * 3.4e3
    p.detuning = -p.omega_m
    p.abar0 = 14.2e3
    p.nbar_bath = 611.0
    return p


def test_derive_matches_closed_forms():
    p = fig2_params()
    d = om.derive(p)
    assert d.kappa == pytest.approx(p.kappa_ex + p.kappa_0)
    assert abs(d.abar) == pytest.approx(d.nbar_cavity**0.5)
    assert d.omega_c == pytest.approx(2.0 * p.g0 * abs(d.abar))
    assert d.omega_c / TWO_PI == pytest.approx(3.72e6, rel=0.02)


def test_coherent_response_shapes():
    p = fig2_params()
    grid = [p.omega_m + (i - 100) * 1e5 for i in range(201)]
    tr = om.coherent_response(p, grid)
    assert len(tr.response) == len(grid)
    mags = [abs(v) for v in tr.response]
    assert min(mags) > 0.0


def test_noise_spectrum_positive_and_even():
    p = fig2_params()
    pos = [p.omega_m + (i - 40) * 2e5 for i in range(81)]
    grid = sorted([-w for w in pos] + pos)
    sp = om.output_spectra(p, grid)
    n = len(grid)
    for v in sp.s_hh.values:
        assert v >= 0.0
    for i in range(n // 2):
        assert sp.s_hh.values[i] == pytest.approx(sp.s_hh.values[n - 1 - i], rel=1e-9)


def test_occupancy_runs():
    p = fig2_params()
    nbar = om.occupancy(p, om.occupancy_grid(p))
    assert 0.5 < nbar < 5.0


def test_pulse_photons_cross_check():
    s = om.PulseSpec()
    s.u0 = 0.1
    s.tau = 32e-9
    s.t0 = 0.5e-6
    s.omega_mod = TWO_PI * 78.226e6
    s.v_pi = 3.0
    s.p_carrier = 1e-6
    s.omega_optical = TWO_PI * 2.8e14
    n = om.pulse_photons(s)
    assert n.closed_form == pytest.approx(n.quadrature, rel=1e-3)


def test_fit_noise_amplitude_round_trip():
    p = fig2_params()
    grid = [p.omega_m + (i - 300) * 2e5 for i in range(601)]
    sp = om.output_spectra(p, grid)
    fit = om.fit_noise_amplitude(sp.s_hh, p)
    assert fit.gamma == pytest.approx(p.gamma_m * p.nbar_bath, rel=1e-6)


def test_combine_errors():
    assert om.combine_errors(0.06, 0.03, 0.07) == pytest.approx(0.0970, abs=5e-4)
    assert om.combine_errors(0.05, 0.0, 0.0) == 0.05
