#pragma once

#include <vector>

#include "optomech/params.hpp"
#include "optomech/timedomain_types.hpp"

namespace optomech {

// Phase modulation depth beta(t) = pi E(t) / v_pi driven by the Gaussian
// envelope; the full drive is beta(t) sin(omega_mod t + phi0).
double modulation_depth(const PulseSpec& s, double t);

// Photon number added to each modulation sideband by one pulse.
struct PulsePhotons {
    double closed_form = 0.0; // pi^(5/2)/(4 sqrt(2)) * tau P / (hbar w) * (u0/v_pi)^2
    double quadrature = 0.0;  // trapezoidal integral of P (beta/2)^2 / (hbar w)
};

PulsePhotons pulse_photons(const PulseSpec& s);

struct PulseResponseOptions {
    bool bandpass = false; // zero-phase fourth-order band limit on the homodyne trace
    double band_lo = 0.0;  // rad/s; defaults applied when bandpass is set and these are 0
    double band_hi = 0.0;
};

// Time-domain homodyne and displacement response to one pulse on a uniform
// time grid. Works through the frequency domain: the swept-drive transfer
// functions sampled on the FFT grid of the zero-padded drive. Padding is
// sized from the slowest decaying mode so circular wraparound stays below
// the causality floor.
TimeTrace pulse_response(const SystemParams& p, const PulseSpec& s,
                         const std::vector<double>& times,
                         const PulseResponseOptions& opts = {});

// Magnitude of the analytic signal.
std::vector<double> hilbert_envelope(const std::vector<double>& x);

// Log-linear fit of an exponential envelope decay over [t_start, t_end].
struct DecayFit {
    double rate = 0.0;         // 1/s, amplitude decay
    double residual_rms = 0.0; // RMS of the log residuals
};

DecayFit fit_envelope_decay(const std::vector<double>& times, const std::vector<double>& env,
                            double t_start, double t_end);

// Same fit restricted to the local maxima of a beating envelope.
DecayFit fit_envelope_maxima_decay(const std::vector<double>& times,
                                   const std::vector<double>& env, double t_start,
                                   double t_end);

} // namespace optomech
