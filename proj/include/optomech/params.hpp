#pragma once

#include <complex>

namespace optomech {

// Operating point of the driven cavity optomechanical system.
// All rates and frequencies are angular (rad/s). File and CLI interfaces
// speak plain Hz; the factor 2 pi lives at that boundary, nowhere else.
struct SystemParams {
    double omega_m = 0.0;   // rad/s, mechanical resonance
    double gamma_m = 0.0;   // rad/s, intrinsic mechanical energy damping
    double kappa_ex = 0.0;  // rad/s, input coupling rate
    double kappa_0 = 0.0;   // rad/s, intrinsic cavity loss rate
    double g0 = 0.0;        // rad/s, vacuum optomechanical coupling
    double detuning = 0.0;  // rad/s, mean detuning of drive from cavity (signed)
    double abar0 = 0.0;     // sqrt(photons), resonant intracavity amplitude scale
    double g_pte = 0.0;     // rad/s, photothermoelastic strength (may be negative)
    double g_ptr = 0.0;     // rad/s, photothermorefractive strength
    double nbar_bath = 0.0; // mean bath phonon occupancy
    double eta_cryo = 1.0;  // detection path transmission, in [0, 1]
    double bs_ratio = 0.5;  // power fraction routed to the local oscillator, in [0, 1]
    double phi_lo = 0.0;    // rad, local oscillator phase
    double s_lo_amp = 1.0;  // sqrt(photons/s), local oscillator mean amplitude

    // Throws ValidationError naming the offending field.
    void validate() const;
};

// Quantities fixed by a parameter set. abar carries the cavity Lorentzian
// phase; everything else is real and non-negative.
struct DerivedRates {
    double kappa = 0.0;               // kappa_0 + kappa_ex
    std::complex<double> abar;        // mean intracavity amplitude
    double nbar_cavity = 0.0;         // |abar|^2
    double omega_c = 0.0;             // 2 g0 |abar|, coherent coupling rate
    double gamma_cool = 0.0;          // omega_c^2 / kappa, resolved-sideband cooling rate
    double nbar_min = 0.0;            // kappa^2 / (16 omega_m^2), backaction limit
    double gamma_decoherence = 0.0;   // gamma_m * nbar_bath
};

DerivedRates derive(const SystemParams& p);

// Ratio by which the lower motional sideband is weaker than the upper,
// 1 - nbar/(nbar + 1) = 1/(nbar + 1).
double sideband_asymmetry(double nbar);

// Bose occupancy in the high-temperature limit, k_B T / (hbar omega_m).
double bath_occupancy(double temperature, double omega_m);

} // namespace optomech
