#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optomech/basis.hpp"
#include "optomech/params.hpp"

namespace optomech {

// Symmetrized power spectral density sampled on a strictly increasing
// frequency grid (rad/s). Auto-spectra are non-negative.
struct Spectrum {
    std::vector<double> grid;
    std::vector<double> values;
    std::string unit_label;
};

// Normalization of the thermal Langevin force PSD. The classical choice
// 4 nbar gamma_m is the default analysis convention; the quantum variant
// 4 (nbar + 1/2) gamma_m exists as a diagnostic.
enum class ForceNoise { classical, quantum };

using CovarianceMatrix = Eigen::Matrix<double, kNumChannels, kNumChannels>;

// Symmetrized input covariances at one frequency. Nonzero entries: the four
// vacuum pairs at 1/2, the thermal force diagonal, and the cavity frequency
// noise diagonal interpolated from trn_table (clamped to its end values,
// zero when no table is given).
CovarianceMatrix input_covariance(const SystemParams& p, double omega,
                                  const Spectrum* trn_table = nullptr,
                                  ForceNoise fn = ForceNoise::classical);

struct OutputSpectra {
    Spectrum s_hh; // homodyne PSD, model units
    Spectrum s_qq; // oscillator quadrature PSD
};

// Output covariances N_out = M(+omega) N_in M(-omega)^T on the given grid.
// Both diagonals must come out real to 1e-9 relative; a larger imaginary
// residue raises NumericalError.
OutputSpectra output_spectra(const SystemParams& p, const std::vector<double>& grid,
                             const Spectrum* trn_table = nullptr,
                             ForceNoise fn = ForceNoise::classical);

// Same spectra split into the part independent of the thermal force and the
// coefficient of the force PSD; s = floor + psd_value * thermal_unit exactly.
// Lets amplitude fits and Monte Carlo draws reuse one transfer-matrix pass.
struct SpectraComponents {
    std::vector<double> grid;
    std::vector<double> hh_floor, hh_thermal_unit;
    std::vector<double> qq_floor, qq_thermal_unit;
};

SpectraComponents output_spectra_components(const SystemParams& p,
                                            const std::vector<double>& grid,
                                            const Spectrum* trn_table = nullptr);

// Flat homodyne PSD with every optomechanical and photothermal coupling
// switched off; the reference for shot-noise normalized spectra.
double shot_noise_level(const SystemParams& p);

// Residual occupancy from trapezoidal integration of s_qq over a grid that
// must cover both signs of frequency:
//   nbar = (<dq^2> + <dp^2>)/4 - 1/2,  <dp^2> weighting (omega/omega_m)^2.
// Raises BandwidthError when the outer tenth of the band carries more than
// 1e-3 of either integral.
double occupancy(const SystemParams& p, const std::vector<double>& grid,
                 const Spectrum* trn_table = nullptr,
                 ForceNoise fn = ForceNoise::classical);

// Pointwise background subtraction, floored at zero. Grids must match.
struct SubtractionResult {
    Spectrum spectrum;
    double floored_fraction; // fraction of bins clipped by the floor
};

SubtractionResult gawbs_subtract(const Spectrum& signal, const Spectrum& reference);

// Known phase modulation tone used to transfer detection gain between runs.
// omega = 0 means no tone was recorded.
struct CalibrationTone {
    double omega = 0.0;       // rad/s, nominal tone frequency
    double phase_depth = 0.0; // rad, applied modulation depth
};

struct CalibrationRef {
    double known_force_psd = 0.0;             // force PSD at the reference condition
    double reference_modulation_response = 0.0; // raw tone amplitude in the reference run
    double gain = 1.0;                        // raw units per model unit
};

// Detection gain from a thermalized reference run: decomposes the raw
// spectrum into the model floor and thermal shapes (joint least squares, a
// bin-weighted form of the peak-area ratio) and returns raw/model. When a
// tone is given it must produce a spike within 3 bins of its nominal
// frequency, else CalibrationError.
CalibrationRef calibrate(const Spectrum& raw_reference, const SystemParams& params_at_reference,
                         const CalibrationTone& tone = {});

// Gain for a later run whose tone response was new_tone_response, assuming an
// unchanged modulation chain.
double transfer_gain(const CalibrationRef& ref, double new_tone_response);

} // namespace optomech
