#pragma once

#include <vector>

namespace optomech {

// Gaussian-windowed phase modulation pulse applied through an EOM:
//   U(t) = E(t) sin(omega_mod t + phi0),  E(t) = u0 exp(-((t - t0)/tau)^2)
struct PulseSpec {
    double u0 = 0.0;            // V, envelope peak voltage
    double tau = 0.0;           // s, Gaussian 1/e half width
    double t0 = 0.0;            // s, envelope center
    double omega_mod = 0.0;     // rad/s, carrier of the modulation
    double phi0 = 0.0;          // rad, modulation phase at t = t0
    double v_pi = 0.0;          // V, half-wave voltage of the modulator
    double p_carrier = 0.0;     // W, optical carrier power at the modulator
    double omega_optical = 0.0; // rad/s, optical carrier frequency

    void validate() const;
    // Peak phase modulation depth pi*u0/v_pi; the linearization is trusted
    // below about 0.3 rad.
    double peak_depth() const;
};

// Sampled pulse run. All vectors share the same length as times.
struct TimeTrace {
    std::vector<double> times;        // s
    std::vector<double> drive;        // rad, modulation envelope beta(t)
    std::vector<double> homodyne;     // model units, detected quadrature
    std::vector<double> displacement; // quadrature units, oscillator response
};

} // namespace optomech
