#pragma once

#include <complex>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

// Complex homodyne response to a unit phase modulation of the drive laser,
// sampled on a strictly increasing grid (rad/s).
struct CoherentTrace {
    std::vector<double> grid;
    std::vector<std::complex<double>> response;
};

// Swept phase modulation: ds_las = i s_las per unit depth, its conjugate
// partner -i conj(s_las), every noise channel silent.
CoherentTrace coherent_response(const SystemParams& p, const std::vector<double>& grid);

// Interference dip width Gamma_m + omega_c^2 kappa / (kappa^2 + 4 (detuning
// + omega_m)^2). The closed form assumes weak coupling; valid is false once
// omega_c exceeds kappa/2.
struct OmitWidth {
    double width = 0.0; // rad/s
    bool weak_coupling_valid = true;
};

OmitWidth omit_dip_width(const SystemParams& p);

// Width of the narrow dip in |response| against the local magnitude-Lorentzian
// background fitted over +/- 10 width_hint around center_hint (the central
// +/- 3 width_hint region is excluded from the background fit). The width is
// the FWHM of 1 - (|response|/background)^2, which recovers the Lorentzian
// width parameter of an amplitude window regardless of how deep the dip is.
struct DipMeasurement {
    double center = 0.0;     // rad/s
    double width = 0.0;      // rad/s
    double prominence = 0.0; // background minus dip minimum
};

DipMeasurement measure_dip_width(const CoherentTrace& trace, double center_hint,
                                 double width_hint);

} // namespace optomech
