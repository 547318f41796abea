#include "optomech/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/optim.hpp"
#include "optomech/threading.hpp"

namespace optomech {

namespace {

// Shared-parameter identities in canonical order. The first three live in
// log space, the couplings are signed and stay linear.
enum SharedIndex { kOmegaM = 0, kKappa, kAbar0, kGpte, kGptr, kNumShared };

const char* kSharedNames[kNumShared] = {"omega_m", "kappa", "abar0", "g_pte", "g_ptr"};

bool is_log(int i) { return i < kGpte; }

struct Problem {
    const std::vector<CoherentTrace>* traces = nullptr;
    SystemParams base;      // source of the frozen fields
    double kex_ratio = 1.0; // kappa_ex / kappa, frozen
    bool active[kNumShared] = {true, true, true, false, false};
    int per_trace = -1; // shared index promoted to one value per trace
    bool complex_res = false;

    size_t n_traces() const { return traces->size(); }

    int n_global() const {
        int n = 0;
        for (int i = 0; i < kNumShared; ++i)
            if (active[i] && i != per_trace)
                ++n;
        return n;
    }

    // theta = [global shared][per-trace shared, if any][detunings]
    int slot_of(int shared) const {
        int s = 0;
        for (int i = 0; i < shared; ++i)
            if (active[i] && i != per_trace)
                ++s;
        return s;
    }
    int per_trace_offset() const { return n_global(); }
    int detuning_offset() const {
        return n_global() + (per_trace >= 0 ? static_cast<int>(n_traces()) : 0);
    }
    int n_params() const { return detuning_offset() + static_cast<int>(n_traces()); }

    double encode(int shared, double value) const {
        return is_log(shared) ? std::log(value) : value;
    }
    double decode(int shared, double t) const { return is_log(shared) ? std::exp(t) : t; }

    double shared_value(const Eigen::VectorXd& theta, int shared, size_t trace) const {
        if (!active[shared]) {
            switch (shared) {
            case kOmegaM: return base.omega_m;
            case kKappa: return base.kappa_ex + base.kappa_0;
            case kAbar0: return base.abar0;
            case kGpte: return base.g_pte;
            default: return base.g_ptr;
            }
        }
        const int slot = shared == per_trace
                             ? per_trace_offset() + static_cast<int>(trace)
                             : slot_of(shared);
        return decode(shared, theta[slot]);
    }

    SystemParams params_for(const Eigen::VectorXd& theta, size_t trace) const {
        SystemParams p = base;
        p.omega_m = shared_value(theta, kOmegaM, trace);
        const double kappa = shared_value(theta, kKappa, trace);
        p.kappa_ex = kappa * kex_ratio;
        p.kappa_0 = kappa * (1.0 - kex_ratio);
        p.abar0 = shared_value(theta, kAbar0, trace);
        p.g_pte = shared_value(theta, kGpte, trace);
        p.g_ptr = shared_value(theta, kGptr, trace);
        p.detuning = theta[detuning_offset() + static_cast<int>(trace)];
        return p;
    }

    size_t n_residuals() const {
        size_t n = 0;
        for (const auto& t : *traces)
            n += t.grid.size();
        return complex_res ? 2 * n : n;
    }

    Eigen::VectorXd residuals(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd r(n_residuals());
        size_t k = 0;
        for (size_t t = 0; t < n_traces(); ++t) {
            const CoherentTrace& data = (*traces)[t];
            const SystemParams p = params_for(theta, t);
            const CoherentTrace model = coherent_response(p, data.grid);
            for (size_t i = 0; i < data.grid.size(); ++i) {
                if (complex_res) {
                    r[k++] = model.response[i].real() - data.response[i].real();
                    r[k++] = model.response[i].imag() - data.response[i].imag();
                } else {
                    r[k++] = std::abs(model.response[i]) - std::abs(data.response[i]);
                }
            }
        }
        return r;
    }
};

void check_traces(const std::vector<CoherentTrace>& traces) {
    if (traces.empty())
        throw ValidationError("fit: need at least one trace");
    for (const auto& t : traces) {
        if (t.grid.size() != t.response.size())
            throw ShapeError("fit: trace grid and response lengths differ");
        if (t.grid.size() < 8)
            throw ValidationError("fit: trace too short");
    }
}

std::vector<double> initial_detunings(const std::vector<CoherentTrace>& traces,
                                      const SystemParams& init, const FitOptions& opts) {
    if (!opts.detunings_init.empty()) {
        if (opts.detunings_init.size() != traces.size())
            throw ShapeError("fit: detunings_init length must match the trace count");
        return opts.detunings_init;
    }
    // The cavity line shows up as the broad maximum of |response| at
    // |detuning|; the magnitude cannot tell the sign, so it comes from init.
    const double sign = init.detuning > 0.0 ? 1.0 : -1.0;
    std::vector<double> dets;
    dets.reserve(traces.size());
    for (const auto& t : traces) {
        size_t imax = 0;
        double best = -1.0;
        for (size_t i = 0; i < t.grid.size(); ++i) {
            const double m = std::abs(t.response[i]);
            if (m > best) {
                best = m;
                imax = i;
            }
        }
        dets.push_back(sign * std::abs(t.grid[imax]));
    }
    return dets;
}

Problem make_problem(const std::vector<CoherentTrace>& traces, const SystemParams& init,
                     const FitOptions& opts, int per_trace) {
    init.validate();
    check_traces(traces);
    Problem pb;
    pb.traces = &traces;
    pb.base = init;
    const double kappa = init.kappa_ex + init.kappa_0;
    pb.kex_ratio = init.kappa_ex / kappa;
    pb.active[kGpte] = opts.fit_g_pte;
    pb.active[kGptr] = opts.fit_g_ptr;
    pb.per_trace = per_trace;
    pb.complex_res = opts.complex_residuals;
    if (per_trace >= 0 && !pb.active[per_trace])
        throw ValidationError("fit: cannot scatter a frozen parameter");
    return pb;
}

Eigen::VectorXd initial_theta(const Problem& pb, const std::vector<double>& dets) {
    const SystemParams& p = pb.base;
    const double shared_init[kNumShared] = {p.omega_m, p.kappa_ex + p.kappa_0, p.abar0,
                                            p.g_pte, p.g_ptr};
    Eigen::VectorXd theta(pb.n_params());
    for (int i = 0; i < kNumShared; ++i) {
        if (!pb.active[i] || i == pb.per_trace)
            continue;
        if (is_log(i) && !(shared_init[i] > 0.0))
            throw ValidationError(std::string("fit: init.") + kSharedNames[i] +
                                  " must be positive");
        theta[pb.slot_of(i)] = pb.encode(i, shared_init[i]);
    }
    if (pb.per_trace >= 0) {
        for (size_t t = 0; t < pb.n_traces(); ++t)
            theta[pb.per_trace_offset() + static_cast<int>(t)] =
                pb.encode(pb.per_trace, shared_init[pb.per_trace]);
    }
    for (size_t t = 0; t < pb.n_traces(); ++t)
        theta[pb.detuning_offset() + static_cast<int>(t)] = dets[t];
    return theta;
}

Eigen::VectorXd step_scales(const Problem& pb, const std::vector<double>& dets) {
    Eigen::VectorXd s = Eigen::VectorXd::Ones(pb.n_params());
    // Log parameters move in natural-log units, scale 1. The couplings can
    // start at 0, so give their difference step an absolute floor of
    // 2 pi * 100 rad/s; detunings get a floor tied to omega_m.
    auto coupling_scale = [&](double v) { return std::max(std::abs(v), kTwoPi * 100.0); };
    if (pb.active[kGpte] && pb.per_trace != kGpte)
        s[pb.slot_of(kGpte)] = coupling_scale(pb.base.g_pte);
    if (pb.active[kGptr] && pb.per_trace != kGptr)
        s[pb.slot_of(kGptr)] = coupling_scale(pb.base.g_ptr);
    if (pb.per_trace == kGpte || pb.per_trace == kGptr) {
        const double v = pb.per_trace == kGpte ? pb.base.g_pte : pb.base.g_ptr;
        for (size_t t = 0; t < pb.n_traces(); ++t)
            s[pb.per_trace_offset() + static_cast<int>(t)] = coupling_scale(v);
    }
    for (size_t t = 0; t < pb.n_traces(); ++t) {
        s[pb.detuning_offset() + static_cast<int>(t)] =
            std::max(std::abs(dets[t]), 1e-3 * pb.base.omega_m);
    }
    return s;
}

LMResult run_fit(const Problem& pb, const std::vector<double>& dets, int max_iterations) {
    LMOptions lm;
    lm.max_iterations = max_iterations;
    lm.step_scale = step_scales(pb, dets);
    const Eigen::VectorXd theta0 = initial_theta(pb, dets);
    const double huge = 1e150;
    ResidualFn fn = [&pb, huge](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        try {
            return pb.residuals(theta);
        } catch (const Error&) {
            // Off-basin step (overflowed parameter, singular response):
            // reject it through the cost instead of aborting the fit.
            return Eigen::VectorXd::Constant(static_cast<int>(pb.n_residuals()), huge);
        }
    };
    return levenberg_marquardt(fn, theta0, lm);
}

} // namespace

FitResult fit_coherent_series(const std::vector<CoherentTrace>& traces,
                              const SystemParams& init, const FitOptions& opts) {
    const Problem pb = make_problem(traces, init, opts, -1);
    const std::vector<double> dets = initial_detunings(traces, init, opts);
    const LMResult lm = run_fit(pb, dets, opts.max_iterations);

    FitResult out;
    out.omega_m = pb.shared_value(lm.theta, kOmegaM, 0);
    out.kappa = pb.shared_value(lm.theta, kKappa, 0);
    out.abar0 = pb.shared_value(lm.theta, kAbar0, 0);
    out.g_pte = pb.shared_value(lm.theta, kGpte, 0);
    out.g_ptr = pb.shared_value(lm.theta, kGptr, 0);
    out.detunings.resize(traces.size());
    for (size_t t = 0; t < traces.size(); ++t)
        out.detunings[t] = lm.theta[pb.detuning_offset() + static_cast<int>(t)];
    out.residual_norm = lm.residual_norm;
    out.converged = lm.converged;
    out.iterations = lm.iterations;
    return out;
}

NoiseAmplitudeFit fit_noise_amplitude(const Spectrum& spectrum, const SystemParams& params,
                                      const CalibrationRef& calib,
                                      const NoiseFitOptions& opts) {
    params.validate();
    if (spectrum.grid.size() != spectrum.values.size())
        throw ShapeError("fit_noise_amplitude: grid and values lengths differ");
    if (spectrum.grid.size() < 8)
        throw ValidationError("fit_noise_amplitude: spectrum too short");
    if (!(calib.gain > 0.0) || !std::isfinite(calib.gain))
        throw ValidationError("fit_noise_amplitude: calibration gain must be positive");

    const SpectraComponents c =
        output_spectra_components(params, spectrum.grid, opts.trn_table);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < spectrum.grid.size(); ++i) {
        const double u = c.hh_thermal_unit[i];
        const double y = spectrum.values[i] / calib.gain - c.hh_floor[i];
        num += u * y;
        den += u * u;
    }
    if (!(den > 0.0))
        throw DegenerateFitError("fit_noise_amplitude: thermal shape vanishes on this grid "
                                 "(is g0 or abar0 zero?)");
    double amplitude = num / den; // force PSD, 4 nbar gamma_m
    NoiseAmplitudeFit f;
    if (amplitude <= 0.0) {
        f.floored = true;
        amplitude = 0.0;
    }
    f.gamma = amplitude / 4.0;
    SystemParams at_fit = params;
    at_fit.nbar_bath = amplitude / (4.0 * params.gamma_m);
    f.nbar = occupancy(at_fit, occupancy_grid(at_fit, opts.occupancy_quality), opts.trn_table);
    return f;
}

std::map<std::string, double> per_parameter_scatter(const std::vector<CoherentTrace>& traces,
                                                    const SystemParams& init,
                                                    const FitOptions& opts) {
    const FitResult global = fit_coherent_series(traces, init, opts);

    // Restart the scatter fits from the global solution; the per-trace
    // copies then only have to absorb trace-to-trace drift.
    SystemParams at_global = init;
    at_global.omega_m = global.omega_m;
    const double kappa0 = init.kappa_ex + init.kappa_0;
    at_global.kappa_ex = global.kappa * (init.kappa_ex / kappa0);
    at_global.kappa_0 = global.kappa * (init.kappa_0 / kappa0);
    at_global.abar0 = global.abar0;
    at_global.g_pte = global.g_pte;
    at_global.g_ptr = global.g_ptr;

    const double global_value[kNumShared] = {global.omega_m, global.kappa, global.abar0,
                                             global.g_pte, global.g_ptr};
    std::map<std::string, double> out;
    for (int s = 0; s < kNumShared; ++s) {
        if (s >= kGpte && !((s == kGpte && opts.fit_g_pte) || (s == kGptr && opts.fit_g_ptr)))
            continue;
        const Problem pb = make_problem(traces, at_global, opts, s);
        const LMResult lm = run_fit(pb, global.detunings, opts.max_iterations);
        double ss = 0.0;
        for (size_t t = 0; t < traces.size(); ++t) {
            const double v = pb.decode(s, lm.theta[pb.per_trace_offset() + static_cast<int>(t)]);
            const double d = v - global_value[s];
            ss += d * d;
        }
        out[kSharedNames[s]] = std::sqrt(ss / static_cast<double>(traces.size()));
    }
    return out;
}

namespace {

double standard_normal(std::mt19937_64& eng) {
    // Box-Muller on the raw 53-bit stream; self-contained so seeded runs
    // reproduce bit for bit across standard libraries.
    double u1 = 0.0;
    do {
        u1 = static_cast<double>(eng() >> 11) * 0x1p-53;
    } while (u1 <= 0.0);
    const double u2 = static_cast<double>(eng() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double draw_truncated(std::mt19937_64& eng, double mean, double sigma, bool positive) {
    if (sigma == 0.0)
        return mean;
    for (int tries = 0; tries < 1000; ++tries) {
        const double v = mean + sigma * standard_normal(eng);
        if (!positive || v > 0.0)
            return v;
    }
    throw NumericalError("monte carlo: truncated draw kept violating positivity");
}

} // namespace

MonteCarloResult monte_carlo_errors(const SystemParams& params,
                                    const std::map<std::string, double>& scatter,
                                    const Spectrum& spectrum, int n_draws, uint64_t seed,
                                    const NoiseFitOptions& opts) {
    params.validate();
    if (n_draws < 100)
        throw ValidationError("monte_carlo_errors: need at least 100 draws");
    double sigma[kNumShared] = {0, 0, 0, 0, 0};
    for (const auto& [key, value] : scatter) {
        if (!(value >= 0.0))
            throw ValidationError("monte_carlo_errors: scatter for " + key +
                                  " must be >= 0");
        bool known = false;
        for (int i = 0; i < kNumShared; ++i) {
            if (key == kSharedNames[i]) {
                sigma[i] = value;
                known = true;
            }
        }
        if (!known)
            throw ValidationError("monte_carlo_errors: unknown scatter key " + key);
    }
    const double kappa = params.kappa_ex + params.kappa_0;
    const double kex_ratio = params.kappa_ex / kappa;
    const double mean[kNumShared] = {params.omega_m, kappa, params.abar0, params.g_pte,
                                     params.g_ptr};

    // Reference tone for the calibration transfer, placed at the half-width
    // point of the cavity envelope below the mechanical line: clear of the
    // transparency window and the thermal peak, but still on the slope where
    // the envelope shape matters. The measured tone area stays fixed across
    // draws; each draw reinterprets it through its own predicted response.
    const std::vector<double> tone_grid = {params.omega_m - 0.5 * kappa};
    const double tone_ref = std::norm(coherent_response(params, tone_grid).response[0]);

    struct Slot {
        double gamma = 0.0, nbar = 0.0;
        bool ok = false;
    };
    std::vector<Slot> slots(n_draws);
    parallel_for(static_cast<size_t>(n_draws), [&](size_t i) {
        std::mt19937_64 eng(seed + i);
        double v[kNumShared];
        for (int s = 0; s < kNumShared; ++s)
            v[s] = draw_truncated(eng, mean[s], sigma[s], is_log(s));
        SystemParams d = params;
        d.omega_m = v[kOmegaM];
        d.kappa_ex = v[kKappa] * kex_ratio;
        d.kappa_0 = v[kKappa] * (1.0 - kex_ratio);
        d.abar0 = v[kAbar0];
        d.g_pte = v[kGpte];
        d.g_ptr = v[kGptr];
        try {
            // The implied chain gain rescales the whole spectrum before the
            // amplitude fit, so parameter error reaches the calibrated
            // amplitude through the tone, not just through the fit shape.
            CalibrationRef cal;
            cal.reference_modulation_response =
                std::norm(coherent_response(d, tone_grid).response[0]);
            cal.gain = transfer_gain(cal, tone_ref);
            const NoiseAmplitudeFit f = fit_noise_amplitude(spectrum, d, cal, opts);
            slots[i] = {f.gamma, f.nbar, true};
        } catch (const Error&) {
            // counted below; a fraction of wild draws is expected
        }
    });

    MonteCarloResult out;
    for (int i = 0; i < n_draws; ++i) {
        if (slots[i].ok)
            out.draws.push_back({i, slots[i].gamma, slots[i].nbar});
        else
            ++out.n_failed;
    }
    const double failed_frac = static_cast<double>(out.n_failed) / n_draws;
    if (failed_frac > 0.2) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "monte_carlo_errors: %.0f%% of draws failed to fit", 100.0 * failed_frac);
        throw NumericalError(buf);
    }

    auto rel_spread = [&](auto field) {
        double m = 0.0;
        for (const auto& d : out.draws)
            m += field(d);
        m /= static_cast<double>(out.draws.size());
        double ss = 0.0;
        for (const auto& d : out.draws) {
            const double r = field(d) - m;
            ss += r * r;
        }
        const double sd = std::sqrt(ss / static_cast<double>(out.draws.size()));
        return m != 0.0 ? sd / std::abs(m) : 0.0;
    };
    out.gamma_model_rel = rel_spread([](const MonteCarloDraw& d) { return d.gamma; });
    out.nbar_model_rel = rel_spread([](const MonteCarloDraw& d) { return d.nbar; });
    return out;
}

double combine_errors(double model_rel, double calib_rel, double gawbs_rel) {
    if (!(model_rel >= 0.0) || !(calib_rel >= 0.0) || !(gawbs_rel >= 0.0))
        throw ValidationError("combine_errors: components must be >= 0");
    return std::sqrt(model_rel * model_rel + calib_rel * calib_rel + gawbs_rel * gawbs_rel);
}

void UncertaintyBudget::finalize() {
    gamma_total_rel = combine_errors(gamma_model_rel, calib_rel, gawbs_gamma_rel);
    nbar_total_rel = combine_errors(nbar_model_rel, calib_rel, gawbs_nbar_rel);
}

} // namespace optomech
