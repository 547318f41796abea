#include "optomech/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void KeyValues::set(const std::string& key, double value) {
    set(key, format_double(value));
}

void KeyValues::set(const std::string& key, const std::string& value) {
    if (items_.find(key) == items_.end())
        order_.push_back(key);
    items_[key] = value;
}

bool KeyValues::has(const std::string& key) const {
    return items_.find(key) != items_.end();
}

const std::string& KeyValues::get_raw(const std::string& key) const {
    auto it = items_.find(key);
    if (it == items_.end())
        throw ValidationError("missing config key: " + key);
    return it->second;
}

double KeyValues::get_double(const std::string& key) const {
    const std::string& raw = get_raw(key);
    try {
        size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (trim(raw.substr(pos)).empty())
            return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("config key " + key + " is not a number: '" + raw + "'");
}

double KeyValues::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::string KeyValues::serialize() const {
    std::ostringstream out;
    for (const auto& k : order_)
        out << k << " = " << items_.at(k) << "\n";
    return out.str();
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " has no '=': '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is incomplete: '" + line + "'");
        kv.set(key, value);
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

void save_key_values(const std::string& path, const KeyValues& kv) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write config file: " + path);
    out << kv.serialize();
}

SystemParams system_params_from_config(const KeyValues& kv) {
    SystemParams p;
    p.omega_m = kTwoPi * kv.get_double("omega_m_hz");
    p.gamma_m = kTwoPi * kv.get_double("gamma_m_hz");
    p.kappa_ex = kTwoPi * kv.get_double("kappa_ex_hz");
    p.kappa_0 = kTwoPi * kv.get_double("kappa_0_hz");
    p.g0 = kTwoPi * kv.get_double("g0_hz");
    p.detuning = kTwoPi * kv.get_double("detuning_hz");
    p.abar0 = kv.get_double("abar0");
    p.nbar_bath = kv.get_double("nbar_bath");
    p.g_pte = kTwoPi * kv.get_double_or("g_pte_hz", 0.0);
    p.g_ptr = kTwoPi * kv.get_double_or("g_ptr_hz", 0.0);
    p.eta_cryo = kv.get_double_or("eta_cryo", 1.0);
    p.bs_ratio = kv.get_double_or("bs_ratio", 0.5);
    p.phi_lo = kv.get_double_or("phi_lo_rad", 0.0);
    p.s_lo_amp = kv.get_double_or("s_lo_amp", 1.0);
    p.validate();
    return p;
}

KeyValues system_params_to_config(const SystemParams& p) {
    KeyValues kv;
    kv.set("omega_m_hz", p.omega_m / kTwoPi);
    kv.set("gamma_m_hz", p.gamma_m / kTwoPi);
    kv.set("kappa_ex_hz", p.kappa_ex / kTwoPi);
    kv.set("kappa_0_hz", p.kappa_0 / kTwoPi);
    kv.set("g0_hz", p.g0 / kTwoPi);
    kv.set("detuning_hz", p.detuning / kTwoPi);
    kv.set("abar0", p.abar0);
    kv.set("nbar_bath", p.nbar_bath);
    kv.set("g_pte_hz", p.g_pte / kTwoPi);
    kv.set("g_ptr_hz", p.g_ptr / kTwoPi);
    kv.set("eta_cryo", p.eta_cryo);
    kv.set("bs_ratio", p.bs_ratio);
    kv.set("phi_lo_rad", p.phi_lo);
    kv.set("s_lo_amp", p.s_lo_amp);
    return kv;
}

PulseSpec pulse_spec_from_config(const KeyValues& kv) {
    PulseSpec s;
    s.u0 = kv.get_double("u0_v");
    s.tau = kv.get_double("tau_s");
    s.t0 = kv.get_double("t0_s");
    s.omega_mod = kTwoPi * kv.get_double("omega_mod_hz");
    s.phi0 = kv.get_double_or("phi0_rad", 0.0);
    s.v_pi = kv.get_double("v_pi_v");
    s.p_carrier = kv.get_double("p_carrier_w");
    const double lambda_m = kv.get_double("wavelength_nm") * 1e-9;
    if (lambda_m <= 0.0)
        throw ValidationError("wavelength_nm must be > 0");
    s.omega_optical = kTwoPi * codata().speed_of_light / lambda_m;
    s.validate();
    return s;
}

} // namespace optomech
