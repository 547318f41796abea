#include "optomech/params.hpp"

#include <cmath>
#include <string>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require(bool ok, const char* field, const std::string& why) {
    if (!ok)
        throw ValidationError(std::string("invalid parameter ") + field + ": " + why);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void SystemParams::validate() const {
    require(finite(omega_m) && omega_m > 0.0, "omega_m", "must be finite and > 0");
    require(finite(gamma_m) && gamma_m > 0.0, "gamma_m", "must be finite and > 0");
    require(finite(kappa_ex) && kappa_ex >= 0.0, "kappa_ex", "must be finite and >= 0");
    require(finite(kappa_0) && kappa_0 >= 0.0, "kappa_0", "must be finite and >= 0");
    require(kappa_ex + kappa_0 > 0.0, "kappa_ex", "kappa_ex + kappa_0 must be > 0");
    require(finite(g0) && g0 >= 0.0, "g0", "must be finite and >= 0");
    require(finite(detuning), "detuning", "must be finite");
    require(finite(abar0) && abar0 >= 0.0, "abar0", "must be finite and >= 0");
    require(finite(g_pte), "g_pte", "must be finite");
    require(finite(g_ptr), "g_ptr", "must be finite");
    require(finite(nbar_bath) && nbar_bath >= 0.0, "nbar_bath", "must be finite and >= 0");
    require(finite(eta_cryo) && eta_cryo >= 0.0 && eta_cryo <= 1.0, "eta_cryo", "must lie in [0, 1]");
    require(finite(bs_ratio) && bs_ratio >= 0.0 && bs_ratio <= 1.0, "bs_ratio", "must lie in [0, 1]");
    require(finite(phi_lo), "phi_lo", "must be finite");
    require(finite(s_lo_amp) && s_lo_amp >= 0.0, "s_lo_amp", "must be finite and >= 0");
}

DerivedRates derive(const SystemParams& p) {
    p.validate();
    DerivedRates d;
    d.kappa = p.kappa_0 + p.kappa_ex;
    // Steady-state cavity Lorentzian; abar0 is the on-resonance value.
    const std::complex<double> denom(d.kappa / 2.0, -p.detuning);
    d.abar = p.abar0 * (d.kappa / 2.0) / denom;
    d.nbar_cavity = std::norm(d.abar);
    d.omega_c = 2.0 * p.g0 * std::abs(d.abar);
    d.gamma_cool = d.omega_c * d.omega_c / d.kappa;
    d.nbar_min = (d.kappa * d.kappa) / (16.0 * p.omega_m * p.omega_m);
    d.gamma_decoherence = p.gamma_m * p.nbar_bath;
    return d;
}

double sideband_asymmetry(double nbar) {
    if (!std::isfinite(nbar) || nbar < 0.0)
        throw ValidationError("sideband_asymmetry: nbar must be finite and >= 0");
    return 1.0 / (nbar + 1.0);
}

double bath_occupancy(double temperature, double omega_m) {
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw ValidationError("bath_occupancy: temperature must be finite and >= 0");
    if (!std::isfinite(omega_m) || omega_m <= 0.0)
        throw ValidationError("bath_occupancy: omega_m must be finite and > 0");
    const auto c = codata();
    return c.k_boltzmann * temperature / (c.hbar * omega_m);
}

} // namespace optomech
