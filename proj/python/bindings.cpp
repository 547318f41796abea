// Python bindings for the main operations: derived rates, spectra, coherent
// response, pulses and the fitting pipeline. Vectors map to python lists;
// frequencies stay angular (rad/s) exactly like the C++ API.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optomech/coherent.hpp"
#include "optomech/fitting.hpp"
#include "optomech/grid.hpp"
#include "optomech/linear_response.hpp"
#include "optomech/params.hpp"
#include "optomech/spectra.hpp"
#include "optomech/timedomain.hpp"
#include "optomech/version.hpp"

namespace py = pybind11;
using namespace optomech;

PYBIND11_MODULE(_optomech, m) {
    m.attr("__version__") = kVersion;

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("omega_m", &SystemParams::omega_m)
        .def_readwrite("gamma_m", &SystemParams::gamma_m)
        .def_readwrite("kappa_ex", &SystemParams::kappa_ex)
        .def_readwrite("kappa_0", &SystemParams::kappa_0)
        .def_readwrite("g0", &SystemParams::g0)
        .def_readwrite("detuning", &SystemParams::detuning)
        .def_readwrite("abar0", &SystemParams::abar0)
        .def_readwrite("g_pte", &SystemParams::g_pte)
        .def_readwrite("g_ptr", &SystemParams::g_ptr)
        .def_readwrite("nbar_bath", &SystemParams::nbar_bath)
        .def_readwrite("eta_cryo", &SystemParams::eta_cryo)
        .def_readwrite("bs_ratio", &SystemParams::bs_ratio)
        .def_readwrite("phi_lo", &SystemParams::phi_lo)
        .def_readwrite("s_lo_amp", &SystemParams::s_lo_amp)
        .def("validate", &SystemParams::validate);

    py::class_<DerivedRates>(m, "DerivedRates")
        .def_readonly("kappa", &DerivedRates::kappa)
        .def_readonly("abar", &DerivedRates::abar)
        .def_readonly("nbar_cavity", &DerivedRates::nbar_cavity)
        .def_readonly("omega_c", &DerivedRates::omega_c)
        .def_readonly("gamma_cool", &DerivedRates::gamma_cool)
        .def_readonly("nbar_min", &DerivedRates::nbar_min)
        .def_readonly("gamma_decoherence", &DerivedRates::gamma_decoherence);

    m.def("derive", &derive);
    m.def("sideband_asymmetry", &sideband_asymmetry);
    m.def("bath_occupancy", &bath_occupancy);

    py::class_<Spectrum>(m, "Spectrum")
        .def(py::init<>())
        .def_readwrite("grid", &Spectrum::grid)
        .def_readwrite("values", &Spectrum::values)
        .def_readwrite("unit_label", &Spectrum::unit_label);

    py::class_<CoherentTrace>(m, "CoherentTrace")
        .def(py::init<>())
        .def_readwrite("grid", &CoherentTrace::grid)
        .def_readwrite("response", &CoherentTrace::response);

    m.def("coherent_response", &coherent_response);
    m.def(
        "omit_dip_width",
        [](const SystemParams& p) {
            const OmitWidth w = omit_dip_width(p);
            return py::make_tuple(w.width, w.weak_coupling_valid);
        },
        "returns (width_rad_s, weak_coupling_valid)");

    py::class_<OutputSpectra>(m, "OutputSpectra")
        .def_readonly("s_hh", &OutputSpectra::s_hh)
        .def_readonly("s_qq", &OutputSpectra::s_qq);

    py::enum_<ForceNoise>(m, "ForceNoise")
        .value("classical", ForceNoise::classical)
        .value("quantum", ForceNoise::quantum);

    m.def(
        "output_spectra",
        [](const SystemParams& p, const std::vector<double>& grid, ForceNoise fn) {
            return output_spectra(p, grid, nullptr, fn);
        },
        py::arg("params"), py::arg("grid"), py::arg("force_noise") = ForceNoise::classical);
    m.def("shot_noise_level", &shot_noise_level);
    m.def(
        "occupancy",
        [](const SystemParams& p, const std::vector<double>& grid, ForceNoise fn) {
            return occupancy(p, grid, nullptr, fn);
        },
        py::arg("params"), py::arg("grid"), py::arg("force_noise") = ForceNoise::classical);

    py::enum_<GridQuality>(m, "GridQuality")
        .value("coarse", GridQuality::coarse)
        .value("standard", GridQuality::standard)
        .value("fine", GridQuality::fine);
    m.def("default_spectrum_grid", &default_spectrum_grid, py::arg("params"),
          py::arg("n") = 1 << 14);
    m.def("occupancy_grid", &occupancy_grid, py::arg("params"),
          py::arg("quality") = GridQuality::standard);

    py::class_<NormalModes>(m, "NormalModes")
        .def_readonly("lower", &NormalModes::lower)
        .def_readonly("upper", &NormalModes::upper)
        .def("splitting", &NormalModes::splitting);
    m.def("normal_mode_frequencies", &normal_mode_frequencies);

    py::class_<PulseSpec>(m, "PulseSpec")
        .def(py::init<>())
        .def_readwrite("u0", &PulseSpec::u0)
        .def_readwrite("tau", &PulseSpec::tau)
        .def_readwrite("t0", &PulseSpec::t0)
        .def_readwrite("omega_mod", &PulseSpec::omega_mod)
        .def_readwrite("phi0", &PulseSpec::phi0)
        .def_readwrite("v_pi", &PulseSpec::v_pi)
        .def_readwrite("p_carrier", &PulseSpec::p_carrier)
        .def_readwrite("omega_optical", &PulseSpec::omega_optical)
        .def("peak_depth", &PulseSpec::peak_depth);

    py::class_<PulsePhotons>(m, "PulsePhotons")
        .def_readonly("closed_form", &PulsePhotons::closed_form)
        .def_readonly("quadrature", &PulsePhotons::quadrature);
    m.def("pulse_photons", &pulse_photons);
    m.def("modulation_depth", &modulation_depth);

    py::class_<TimeTrace>(m, "TimeTrace")
        .def_readonly("times", &TimeTrace::times)
        .def_readonly("drive", &TimeTrace::drive)
        .def_readonly("homodyne", &TimeTrace::homodyne)
        .def_readonly("displacement", &TimeTrace::displacement);
    m.def(
        "pulse_response",
        [](const SystemParams& p, const PulseSpec& s, const std::vector<double>& times) {
            return pulse_response(p, s, times);
        },
        py::arg("params"), py::arg("pulse"), py::arg("times"));
    m.def("hilbert_envelope", &hilbert_envelope);

    py::class_<FitOptions>(m, "FitOptions")
        .def(py::init<>())
        .def_readwrite("fit_g_pte", &FitOptions::fit_g_pte)
        .def_readwrite("fit_g_ptr", &FitOptions::fit_g_ptr)
        .def_readwrite("complex_residuals", &FitOptions::complex_residuals)
        .def_readwrite("detunings_init", &FitOptions::detunings_init)
        .def_readwrite("max_iterations", &FitOptions::max_iterations);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("omega_m", &FitResult::omega_m)
        .def_readonly("kappa", &FitResult::kappa)
        .def_readonly("abar0", &FitResult::abar0)
        .def_readonly("g_pte", &FitResult::g_pte)
        .def_readonly("g_ptr", &FitResult::g_ptr)
        .def_readonly("detunings", &FitResult::detunings)
        .def_readonly("residual_norm", &FitResult::residual_norm)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("iterations", &FitResult::iterations);
    m.def("fit_coherent_series", &fit_coherent_series, py::arg("traces"), py::arg("init"),
          py::arg("options") = FitOptions{});

    py::class_<CalibrationRef>(m, "CalibrationRef")
        .def(py::init<>())
        .def_readwrite("known_force_psd", &CalibrationRef::known_force_psd)
        .def_readwrite("reference_modulation_response",
                       &CalibrationRef::reference_modulation_response)
        .def_readwrite("gain", &CalibrationRef::gain);

    py::class_<NoiseAmplitudeFit>(m, "NoiseAmplitudeFit")
        .def_readonly("gamma", &NoiseAmplitudeFit::gamma)
        .def_readonly("nbar", &NoiseAmplitudeFit::nbar)
        .def_readonly("floored", &NoiseAmplitudeFit::floored);
    m.def(
        "fit_noise_amplitude",
        [](const Spectrum& s, const SystemParams& p, const CalibrationRef& c) {
            return fit_noise_amplitude(s, p, c);
        },
        py::arg("spectrum"), py::arg("params"), py::arg("calib") = CalibrationRef{});

    m.def("per_parameter_scatter", &per_parameter_scatter, py::arg("traces"),
          py::arg("init"), py::arg("options") = FitOptions{});

    py::class_<MonteCarloResult>(m, "MonteCarloResult")
        .def_readonly("gamma_model_rel", &MonteCarloResult::gamma_model_rel)
        .def_readonly("nbar_model_rel", &MonteCarloResult::nbar_model_rel)
        .def_readonly("n_failed", &MonteCarloResult::n_failed);
    m.def(
        "monte_carlo_errors",
        [](const SystemParams& p, const std::map<std::string, double>& scatter,
           const Spectrum& s, int n_draws, uint64_t seed) {
            NoiseFitOptions opts;
            opts.occupancy_quality = GridQuality::coarse;
            return monte_carlo_errors(p, scatter, s, n_draws, seed, opts);
        },
        py::arg("params"), py::arg("scatter"), py::arg("spectrum"), py::arg("n_draws"),
        py::arg("seed"));
    m.def("combine_errors", &combine_errors);
}
