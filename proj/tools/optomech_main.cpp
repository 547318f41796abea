// Batch front-end: one subcommand per pipeline stage, flat config files in,
// CSV and key-value reports out. All file frequencies are plain Hz; the
// library speaks rad/s and the factor 2 pi is applied at this boundary.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/csvio.hpp"
#include "optomech/errors.hpp"
#include "optomech/fitting.hpp"
#include "optomech/grid.hpp"
#include "optomech/linear_response.hpp"
#include "optomech/spectra.hpp"
#include "optomech/timedomain.hpp"
#include "optomech/version.hpp"

namespace fs = std::filesystem;
using namespace optomech;

namespace {

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Shared plumbing: the resolved configuration is echoed into every output
// header and hashed into the default output tag, so identical invocations
// produce identical files.
struct Run {
    std::string command;
    std::string out_dir = ".";
    std::string tag_override;
    KeyValues resolved;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    uint64_t seed = 0;

    std::string tag() const {
        if (!tag_override.empty())
            return tag_override;
        return hex16(fnv1a64(command + "\n" + resolved.serialize()));
    }

    std::string path(const std::string& suffix) const {
        return (fs::path(out_dir) / (command + "_" + tag() + suffix)).string();
    }

    std::vector<std::string> header() const {
        std::vector<std::string> h;
        h.push_back("command = " + command);
        h.push_back("frequencies are plain Hz (nu = omega / 2 pi)");
        std::istringstream in(resolved.serialize());
        std::string line;
        while (std::getline(in, line))
            h.push_back(line);
        return h;
    }

    void note_output(const std::string& p) { outputs.push_back(p); }

    void write_manifest() {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["library_version"] = kVersion;
        j["config_hash"] = hex16(fnv1a64(resolved.serialize()));
        j["tag"] = tag();
        j["seed"] = seed;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        const std::string p = path(".run.json");
        std::ofstream f(p);
        if (!f)
            throw ValidationError("cannot write " + p);
        f << j.dump(2) << "\n";
    }
};

void write_report(Run& run, const KeyValues& body) {
    const std::string p = run.path(".txt");
    std::ofstream f(p);
    if (!f)
        throw ValidationError("cannot write " + p);
    for (const auto& line : run.header())
        f << "# " << line << "\n";
    f << body.serialize();
    run.note_output(p);
}

struct GridFlags {
    double fmin_hz = 0.0;
    double fmax_hz = 0.0;
    int points = 2001;

    void attach(CLI::App* cmd) {
        cmd->add_option("--fmin", fmin_hz, "grid start, Hz (default set from the config)");
        cmd->add_option("--fmax", fmax_hz, "grid end, Hz");
        cmd->add_option("--points", points, "grid point count");
    }

    std::vector<double> resolve(const SystemParams& p, KeyValues& resolved) {
        const DerivedRates d = derive(p);
        const double span = 5.0 * std::max({d.kappa, d.omega_c, 200.0 * p.gamma_m});
        if (fmax_hz <= 0.0)
            fmax_hz = (p.omega_m + span) / kTwoPi;
        if (fmin_hz <= 0.0)
            fmin_hz = std::max((p.omega_m - span) / kTwoPi, fmax_hz / (2.0 * points));
        if (points < 16)
            throw ValidationError("--points must be at least 16");
        if (!(fmin_hz > 0.0))
            throw ValidationError("--fmin must be > 0");
        if (!(fmax_hz > fmin_hz))
            throw ValidationError("--fmax must exceed --fmin");
        resolved.set("fmin_hz", fmin_hz);
        resolved.set("fmax_hz", fmax_hz);
        resolved.set("n_points", static_cast<double>(points));
        return linspace(kTwoPi * fmin_hz, kTwoPi * fmax_hz, points);
    }
};

void merge_into(KeyValues& dst, const KeyValues& src) {
    for (const auto& k : src.keys())
        dst.set(k, src.get_raw(k));
}

void write_gnuplot(Run& run, const std::string& data_path, const std::string& plot_expr,
                   const std::string& ylabel) {
    const std::string p = run.path(".gp");
    std::ofstream f(p);
    if (!f)
        throw ValidationError("cannot write " + p);
    f << "# gnuplot script for " << fs::path(data_path).filename().string() << "\n"
      << "set datafile separator ','\n"
      << "set xlabel 'frequency (Hz)'\n"
      << "set ylabel '" << ylabel << "'\n"
      << "plot '" << fs::path(data_path).filename().string() << "' " << plot_expr
      << " with lines notitle\n";
    run.note_output(p);
}

int cmd_derive(const std::string& config_path, Run& run) {
    const KeyValues kv = load_key_values(config_path);
    const SystemParams p = system_params_from_config(kv);
    run.resolved = system_params_to_config(p);
    const DerivedRates d = derive(p);

    KeyValues out;
    out.set("kappa_hz", d.kappa / kTwoPi);
    out.set("abar_re", d.abar.real());
    out.set("abar_im", d.abar.imag());
    out.set("nbar_cavity", d.nbar_cavity);
    out.set("omega_c_hz", d.omega_c / kTwoPi);
    out.set("gamma_cool_hz", d.gamma_cool / kTwoPi);
    out.set("nbar_min", d.nbar_min);
    out.set("gamma_decoherence_hz", d.gamma_decoherence / kTwoPi);

    for (const auto& line : run.header())
        std::cout << "# " << line << "\n";
    std::cout << out.serialize();
    write_report(run, out);
    run.write_manifest();
    return 0;
}

int cmd_simulate_coherent(const std::string& config_path, Run& run, GridFlags& gf,
                          bool gnuplot) {
    const KeyValues kv = load_key_values(config_path);
    const SystemParams p = system_params_from_config(kv);
    run.resolved = system_params_to_config(p);
    const std::vector<double> grid = gf.resolve(p, run.resolved);

    const CoherentTrace tr = coherent_response(p, grid);
    const std::string out = run.path(".csv");
    write_coherent_csv(out, tr, run.header());
    run.note_output(out);

    // Plot-ready copy scaled to unit peak magnitude.
    double peak = 0.0;
    for (const auto& v : tr.response)
        peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        CoherentTrace norm = tr;
        for (auto& v : norm.response)
            v /= peak;
        const std::string norm_out = run.path("_norm.csv");
        write_coherent_csv(norm_out, norm, run.header());
        run.note_output(norm_out);
    }
    if (gnuplot)
        write_gnuplot(run, out, "using 1:(sqrt($2**2+$3**2))", "|response|");
    run.write_manifest();
    return 0;
}

int cmd_simulate_noise(const std::string& config_path, Run& run, GridFlags& gf, bool gnuplot,
                       bool quantum_force, const std::string& trn_path) {
    const KeyValues kv = load_key_values(config_path);
    const SystemParams p = system_params_from_config(kv);
    run.resolved = system_params_to_config(p);
    run.resolved.set("force_noise", quantum_force ? "quantum" : "classical");
    Spectrum trn;
    const Spectrum* trn_ptr = nullptr;
    if (!trn_path.empty()) {
        trn = read_spectrum_csv(trn_path);
        trn_ptr = &trn;
        run.inputs.push_back(trn_path);
        run.resolved.set("trn_table", fs::path(trn_path).filename().string());
    }
    const std::vector<double> grid = gf.resolve(p, run.resolved);

    const OutputSpectra sp = output_spectra(p, grid, trn_ptr,
                                            quantum_force ? ForceNoise::quantum
                                                          : ForceNoise::classical);
    const std::string out = run.path(".csv");
    write_spectrum_csv(out, sp.s_hh, run.header());
    run.note_output(out);

    // Same spectrum relative to the shot-noise floor, the way measured
    // spectra are usually plotted.
    const double floor = shot_noise_level(p);
    if (floor > 0.0) {
        Spectrum rel = sp.s_hh;
        for (auto& v : rel.values)
            v /= floor;
        rel.unit_label = "homodyne PSD / shot noise";
        const std::string rel_out = run.path("_shotnorm.csv");
        write_spectrum_csv(rel_out, rel, run.header());
        run.note_output(rel_out);
    }
    if (gnuplot)
        write_gnuplot(run, out, "using 1:2", "homodyne PSD");
    run.write_manifest();
    return 0;
}

int cmd_simulate_pulse(const std::string& config_path, Run& run, int points_override,
                       bool gnuplot) {
    const KeyValues kv = load_key_values(config_path);
    const SystemParams p = system_params_from_config(kv);
    const PulseSpec ps = pulse_spec_from_config(kv);
    run.resolved = system_params_to_config(p);
    KeyValues pulse_keys;
    for (const char* k : {"u0_v", "tau_s", "t0_s", "omega_mod_hz", "phi0_rad", "v_pi_v",
                          "p_carrier_w", "wavelength_nm"})
        if (kv.has(k))
            pulse_keys.set(k, kv.get_raw(k));
    merge_into(run.resolved, pulse_keys);

    // Window: configured explicitly, or long enough for the slower hybrid
    // mode to ring down.
    const NormalModes nm = normal_mode_frequencies(p);
    const double slowest = std::min(-nm.lower.real(), -nm.upper.real());
    const double t_start = kv.has("t_start_s") ? kv.get_double("t_start_s")
                                               : ps.t0 - 10.0 * ps.tau;
    const double t_end = kv.has("t_end_s")
                             ? kv.get_double("t_end_s")
                             : ps.t0 + std::max(10.0 * ps.tau, 10.0 / slowest);
    if (!(t_end > t_start))
        throw ValidationError("pulse window: t_end_s must exceed t_start_s");
    int n = points_override > 0 ? points_override
                                : static_cast<int>(kv.get_double_or("n_samples", 0.0));
    if (n == 0) {
        // 1 GS/s default, pushed higher when the carrier needs it.
        const double dt = std::min(1e-9, kTwoPi / (16.0 * std::max(ps.omega_mod, p.omega_m)));
        n = static_cast<int>((t_end - t_start) / dt) + 1;
        if (n > (1 << 20))
            n = 1 << 20;
    }
    if (n < 64)
        throw ValidationError("pulse window: need at least 64 samples");
    run.resolved.set("t_start_s", t_start);
    run.resolved.set("t_end_s", t_end);
    run.resolved.set("n_samples", static_cast<double>(n));

    const TimeTrace tt = pulse_response(p, ps, linspace(t_start, t_end, n));
    const std::string out = run.path(".csv");
    write_timetrace_csv(out, tt, run.header());
    run.note_output(out);
    if (gnuplot) {
        const std::string gp = run.path(".gp");
        std::ofstream f(gp);
        if (!f)
            throw ValidationError("cannot write " + gp);
        f << "set datafile separator ','\n"
          << "set xlabel 'time (s)'\n"
          << "plot '" << fs::path(out).filename().string()
          << "' using 1:3 with lines title 'homodyne', '' using 1:2 with lines title "
             "'drive'\n";
        run.note_output(gp);
    }
    run.write_manifest();
    return 0;
}

int cmd_fit_coherent(const std::string& config_path, Run& run,
                     const std::vector<std::string>& trace_paths, const FitOptions& fopts,
                     bool with_scatter) {
    const KeyValues kv = load_key_values(config_path);
    const SystemParams init = system_params_from_config(kv);
    run.resolved = system_params_to_config(init);
    run.resolved.set("fit_g_pte", fopts.fit_g_pte ? 1.0 : 0.0);
    run.resolved.set("fit_g_ptr", fopts.fit_g_ptr ? 1.0 : 0.0);
    run.resolved.set("complex_residuals", fopts.complex_residuals ? 1.0 : 0.0);

    std::vector<CoherentTrace> traces;
    for (const auto& tp : trace_paths) {
        traces.push_back(read_coherent_csv(tp));
        run.inputs.push_back(tp);
        run.resolved.set("trace_" + std::to_string(traces.size() - 1),
                         fs::path(tp).filename().string());
    }

    const FitResult fr = fit_coherent_series(traces, init, fopts);

    // The report doubles as a system config: fitted values replace the
    // initial ones, frozen fields are carried through.
    SystemParams fitted = init;
    fitted.omega_m = fr.omega_m;
    const double kex_ratio = init.kappa_ex / (init.kappa_ex + init.kappa_0);
    fitted.kappa_ex = fr.kappa * kex_ratio;
    fitted.kappa_0 = fr.kappa * (1.0 - kex_ratio);
    fitted.abar0 = fr.abar0;
    fitted.g_pte = fr.g_pte;
    fitted.g_ptr = fr.g_ptr;
    fitted.detuning = fr.detunings.empty() ? init.detuning : fr.detunings[0];

    KeyValues out = system_params_to_config(fitted);
    out.set("kappa_hz", fr.kappa / kTwoPi);
    for (size_t i = 0; i < fr.detunings.size(); ++i)
        out.set("detuning_trace_" + std::to_string(i) + "_hz", fr.detunings[i] / kTwoPi);
    out.set("residual_norm", fr.residual_norm);
    out.set("converged", fr.converged ? 1.0 : 0.0);
    out.set("iterations", static_cast<double>(fr.iterations));

    if (with_scatter) {
        const auto scatter = per_parameter_scatter(traces, init, fopts);
        for (const auto& [name, dx] : scatter) {
            // Frequencies scatter in Hz like their base keys; abar0 is unitless.
            if (name == "abar0")
                out.set("abar0_sigma", dx);
            else
                out.set(name + "_hz_sigma", dx / kTwoPi);
        }
    }
    if (!fr.converged)
        std::cerr << "warning: fit did not converge in " << fr.iterations << " iterations\n";

    write_report(run, out);
    run.write_manifest();
    return 0;
}

int cmd_fit_noise(const std::string& config_path, Run& run, const std::string& spectrum_path,
                  double gain, const std::string& gawbs_path, const std::string& trn_path) {
    const KeyValues kv = load_key_values(config_path);
    const SystemParams p = system_params_from_config(kv);
    run.resolved = system_params_to_config(p);
    run.resolved.set("gain", gain);
    run.inputs.push_back(spectrum_path);

    Spectrum data = read_spectrum_csv(spectrum_path);
    double floored_fraction = 0.0;
    if (!gawbs_path.empty()) {
        const Spectrum ref = read_spectrum_csv(gawbs_path);
        const SubtractionResult sub = gawbs_subtract(data, ref);
        data = sub.spectrum;
        floored_fraction = sub.floored_fraction;
        run.inputs.push_back(gawbs_path);
        run.resolved.set("gawbs_ref", fs::path(gawbs_path).filename().string());
    }
    Spectrum trn;
    NoiseFitOptions nopts;
    if (!trn_path.empty()) {
        trn = read_spectrum_csv(trn_path);
        nopts.trn_table = &trn;
        run.inputs.push_back(trn_path);
        run.resolved.set("trn_table", fs::path(trn_path).filename().string());
    }

    CalibrationRef calib;
    calib.gain = gain;
    const NoiseAmplitudeFit f = fit_noise_amplitude(data, p, calib, nopts);

    KeyValues out;
    out.set("gamma_hz", f.gamma / kTwoPi);
    out.set("nbar", f.nbar);
    out.set("floored", f.floored ? 1.0 : 0.0);
    if (!gawbs_path.empty())
        out.set("gawbs_floored_fraction", floored_fraction);
    write_report(run, out);
    run.write_manifest();
    return 0;
}

int cmd_mc_errors(const std::string& config_path, Run& run, const std::string& spectrum_path,
                  int draws, double calib_rel, double gawbs_gamma_rel, double gawbs_nbar_rel) {
    // The config here is typically a fit-coherent report: system keys plus
    // *_sigma scatter entries.
    const KeyValues kv = load_key_values(config_path);
    const SystemParams p = system_params_from_config(kv);
    run.resolved = system_params_to_config(p);
    run.inputs.push_back(spectrum_path);

    std::map<std::string, double> scatter;
    scatter["omega_m"] = kTwoPi * kv.get_double_or("omega_m_hz_sigma", 0.0);
    scatter["kappa"] = kTwoPi * kv.get_double_or("kappa_hz_sigma", 0.0);
    scatter["abar0"] = kv.get_double_or("abar0_sigma", 0.0);
    scatter["g_pte"] = kTwoPi * kv.get_double_or("g_pte_hz_sigma", 0.0);
    scatter["g_ptr"] = kTwoPi * kv.get_double_or("g_ptr_hz_sigma", 0.0);
    for (const auto& [k, v] : scatter)
        run.resolved.set(k + "_scatter", v / (k == "abar0" ? 1.0 : kTwoPi));
    run.resolved.set("n_draws", static_cast<double>(draws));
    run.resolved.set("seed", static_cast<double>(run.seed));

    const Spectrum data = read_spectrum_csv(spectrum_path);
    NoiseFitOptions nopts;
    nopts.occupancy_quality = GridQuality::coarse;
    const MonteCarloResult mc =
        monte_carlo_errors(p, scatter, data, draws, run.seed, nopts);

    const std::string csv = run.path(".csv");
    {
        std::ofstream f(csv);
        if (!f)
            throw ValidationError("cannot write " + csv);
        for (const auto& line : run.header())
            f << "# " << line << "\n";
        f << "draw,gamma_hz,nbar\n";
        for (const auto& d : mc.draws) {
            f << d.index << "," << format_number(d.gamma / kTwoPi) << ","
              << format_number(d.nbar) << "\n";
        }
    }
    run.note_output(csv);

    UncertaintyBudget budget;
    budget.gamma_model_rel = mc.gamma_model_rel;
    budget.nbar_model_rel = mc.nbar_model_rel;
    budget.calib_rel = calib_rel;
    budget.gawbs_gamma_rel = gawbs_gamma_rel;
    budget.gawbs_nbar_rel = gawbs_nbar_rel;
    budget.finalize();

    KeyValues out;
    out.set("gamma_model_rel", budget.gamma_model_rel);
    out.set("nbar_model_rel", budget.nbar_model_rel);
    out.set("calib_rel", budget.calib_rel);
    out.set("gawbs_gamma_rel", budget.gawbs_gamma_rel);
    out.set("gawbs_nbar_rel", budget.gawbs_nbar_rel);
    out.set("gamma_total_rel", budget.gamma_total_rel);
    out.set("nbar_total_rel", budget.nbar_total_rel);
    out.set("failed_draws", static_cast<double>(mc.n_failed));
    write_report(run, out);
    run.write_manifest();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized cavity optomechanics: spectra, pulses and parameter fits"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", tag, trn_path, gawbs_path;
    std::vector<std::string> input_paths;
    uint64_t seed = 0;
    bool gnuplot = false, quantum_force = false;
    GridFlags gf;

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* opt = cmd->add_option("--config", config_path, "parameter file");
        if (needs_config)
            opt->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory (created if missing)");
        cmd->add_option("--tag", tag, "output tag (default: hash of the resolved config)");
        cmd->add_option("--seed", seed, "random seed for stochastic commands");
    };

    auto* derive_cmd = app.add_subcommand("derive", "print the rates fixed by a config");
    add_common(derive_cmd);

    auto* sim_coh = app.add_subcommand("simulate-coherent", "swept phase-modulation response");
    add_common(sim_coh);
    gf.attach(sim_coh);
    sim_coh->add_flag("--gnuplot", gnuplot, "also write a plot script");

    auto* sim_noise = app.add_subcommand("simulate-noise", "homodyne noise spectrum");
    add_common(sim_noise);
    gf.attach(sim_noise);
    sim_noise->add_flag("--gnuplot", gnuplot, "also write a plot script");
    sim_noise->add_flag("--quantum-force", quantum_force,
                        "use the symmetrized quantum force PSD 4(n+1/2)gamma");
    sim_noise->add_option("--trn-table", trn_path, "cavity frequency-noise PSD table")
        ->check(CLI::ExistingFile);

    auto* sim_pulse = app.add_subcommand("simulate-pulse", "time response to one pulse");
    add_common(sim_pulse);
    int pulse_points = 0;
    sim_pulse->add_option("--points", pulse_points, "sample count override");
    sim_pulse->add_flag("--gnuplot", gnuplot, "also write a plot script");

    auto* fit_coh = app.add_subcommand("fit-coherent", "global fit of response traces");
    add_common(fit_coh);
    fit_coh->add_option("traces", input_paths, "trace CSV files")
        ->required()
        ->check(CLI::ExistingFile);
    bool no_gpte = false, fit_gptr = false, complex_res = false, with_scatter = false;
    int max_iter = 200;
    fit_coh->add_flag("--no-fit-gpte", no_gpte, "freeze g_pte at its config value");
    fit_coh->add_flag("--fit-gptr", fit_gptr, "also fit g_ptr");
    fit_coh->add_flag("--complex", complex_res, "fit Re/Im instead of magnitude");
    fit_coh->add_flag("--scatter", with_scatter,
                      "emit *_sigma keys from per-trace refits (slower)");
    fit_coh->add_option("--max-iter", max_iter, "optimizer iteration cap");

    auto* fit_noise_cmd = app.add_subcommand("fit-noise", "thermal amplitude of a spectrum");
    add_common(fit_noise_cmd);
    fit_noise_cmd->add_option("spectrum", input_paths, "measured spectrum CSV")
        ->required()
        ->expected(1)
        ->check(CLI::ExistingFile);
    double gain = 1.0;
    fit_noise_cmd->add_option("--gain", gain, "detection gain, raw units per model unit");
    fit_noise_cmd->add_option("--gawbs-ref", gawbs_path, "background spectrum to subtract")
        ->check(CLI::ExistingFile);
    fit_noise_cmd->add_option("--trn-table", trn_path, "cavity frequency-noise PSD table")
        ->check(CLI::ExistingFile);

    auto* mc_cmd = app.add_subcommand("mc-errors", "parameter-scatter error budget");
    add_common(mc_cmd);
    mc_cmd->add_option("spectrum", input_paths, "calibrated spectrum CSV")
        ->required()
        ->expected(1)
        ->check(CLI::ExistingFile);
    int draws = 10000;
    double calib_rel = 0.03, gawbs_gamma_rel = 0.0, gawbs_nbar_rel = 0.0;
    mc_cmd->add_option("--draws", draws, "Monte-Carlo draw count");
    mc_cmd->add_option("--calib-rel", calib_rel, "relative calibration error");
    mc_cmd->add_option("--gawbs-gamma-rel", gawbs_gamma_rel, "GAWBS allowance on gamma");
    mc_cmd->add_option("--gawbs-nbar-rel", gawbs_nbar_rel, "GAWBS allowance on nbar");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's exit-code zoo: anything other than a clean
        // --help/--version run is a usage error.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        fs::create_directories(out_dir);
        Run run;
        run.out_dir = out_dir;
        run.tag_override = tag;
        run.seed = seed;
        if (derive_cmd->parsed()) {
            run.command = "derive";
            return cmd_derive(config_path, run);
        }
        if (sim_coh->parsed()) {
            run.command = "simulate-coherent";
            return cmd_simulate_coherent(config_path, run, gf, gnuplot);
        }
        if (sim_noise->parsed()) {
            run.command = "simulate-noise";
            return cmd_simulate_noise(config_path, run, gf, gnuplot, quantum_force, trn_path);
        }
        if (sim_pulse->parsed()) {
            run.command = "simulate-pulse";
            return cmd_simulate_pulse(config_path, run, pulse_points, gnuplot);
        }
        if (fit_coh->parsed()) {
            run.command = "fit-coherent";
            FitOptions fo;
            fo.fit_g_pte = !no_gpte;
            fo.fit_g_ptr = fit_gptr;
            fo.complex_residuals = complex_res;
            fo.max_iterations = max_iter;
            return cmd_fit_coherent(config_path, run, input_paths, fo, with_scatter);
        }
        if (fit_noise_cmd->parsed()) {
            run.command = "fit-noise";
            return cmd_fit_noise(config_path, run, input_paths.at(0), gain, gawbs_path,
                                 trn_path);
        }
        if (mc_cmd->parsed()) {
            run.command = "mc-errors";
            return cmd_mc_errors(config_path, run, input_paths.at(0), draws, calib_rel,
                                 gawbs_gamma_rel, gawbs_nbar_rel);
        }
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
