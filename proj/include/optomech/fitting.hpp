#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "optomech/coherent.hpp"
#include "optomech/grid.hpp"
#include "optomech/params.hpp"
#include "optomech/spectra.hpp"

namespace optomech {

// Global fit of a coherent-response series. Shared across traces:
// omega_m, kappa, abar0 (log space) and optionally g_pte, g_ptr (linear);
// one detuning per trace. Frozen at their init values: gamma_m, g0, the
// kappa_ex/kappa split and every detection parameter.
struct FitOptions {
    bool fit_g_pte = true;
    bool fit_g_ptr = false;
    // Residuals on Re and Im instead of |response|.
    bool complex_residuals = false;
    // One starting detuning per trace. Empty means estimate |detuning| from
    // the broad cavity peak of each trace, with the sign taken from
    // init.detuning (negative when init.detuning is 0).
    std::vector<double> detunings_init;
    int max_iterations = 200;
};

struct FitResult {
    double omega_m = 0.0;
    double kappa = 0.0;
    double abar0 = 0.0;
    double g_pte = 0.0;
    double g_ptr = 0.0;
    std::vector<double> detunings; // one per trace, trace order
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Least squares over all traces and frequencies, uniform weights. Throws
// DegenerateFitError when the parameterization is rank deficient (for
// example all traces at one detuning with a per-trace parameter free);
// plain non-convergence comes back flagged, not thrown.
FitResult fit_coherent_series(const std::vector<CoherentTrace>& traces,
                              const SystemParams& init, const FitOptions& opts = {});

struct NoiseFitOptions {
    GridQuality occupancy_quality = GridQuality::standard;
    const Spectrum* trn_table = nullptr;
};

struct NoiseAmplitudeFit {
    double gamma = 0.0; // rad/s, gamma_m * nbar_bath at the fitted amplitude
    double nbar = 0.0;  // residual occupancy integrated at that amplitude
    bool floored = false; // fitted amplitude was negative, clipped to 0
};

// One-parameter amplitude fit of a calibrated noise spectrum: the spectral
// shape is frozen at params, only the thermal force PSD is free. Exactly
// invariant under scaling spectrum and calib.gain together.
NoiseAmplitudeFit fit_noise_amplitude(const Spectrum& spectrum, const SystemParams& params,
                                      const CalibrationRef& calib,
                                      const NoiseFitOptions& opts = {});

// Detuning-dependence check: refits the series once per shared parameter
// with that parameter free per trace while the others stay global, and
// returns the RMS deviation from the all-global value, keyed by
// omega_m / kappa / abar0 / g_pte / g_ptr (only the fitted ones).
std::map<std::string, double> per_parameter_scatter(const std::vector<CoherentTrace>& traces,
                                                    const SystemParams& init,
                                                    const FitOptions& opts = {});

struct MonteCarloDraw {
    int index = 0; // draw counter, also the RNG seed offset
    double gamma = 0.0;
    double nbar = 0.0;
};

struct MonteCarloResult {
    double gamma_model_rel = 0.0; // std/mean over successful draws
    double nbar_model_rel = 0.0;
    std::vector<MonteCarloDraw> draws; // successful draws in index order
    size_t n_failed = 0;
};

// Redraws the shared parameters from independent truncated normals
// (scatter keyed as in per_parameter_scatter, missing keys held fixed),
// refits the noise amplitude per draw and returns the relative spread.
// Each refit repeats the full extraction: the reference tone, sitting half
// a linewidth below the mechanical resonance, is reinterpreted through the
// drawn model's response, and the implied gain recalibrates the spectrum
// before the amplitude fit. Draw i uses its own engine seeded seed + i, so
// the result is independent of scheduling. More than 20% failed draws
// raises NumericalError.
MonteCarloResult monte_carlo_errors(const SystemParams& params,
                                    const std::map<std::string, double>& scatter,
                                    const Spectrum& spectrum, int n_draws, uint64_t seed,
                                    const NoiseFitOptions& opts = {});

// Root sum square of relative error components.
double combine_errors(double model_rel, double calib_rel, double gawbs_rel);

struct UncertaintyBudget {
    std::map<std::string, double> per_parameter; // parameter scatter, absolute
    double gamma_model_rel = 0.0;
    double nbar_model_rel = 0.0;
    double calib_rel = 0.03;       // absolute calibration of the detection gain
    double gawbs_gamma_rel = 0.0;  // forward-scatter phase noise allowance
    double gawbs_nbar_rel = 0.0;
    double gamma_total_rel = 0.0;
    double nbar_total_rel = 0.0;

    // Sets the totals to the root sum square of their components.
    void finalize();
};

} // namespace optomech
