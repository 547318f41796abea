#pragma once

#include <map>
#include <string>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/timedomain_types.hpp"

namespace optomech {

// Flat "key = value" dialect with '#' comments. Insertion order is kept so
// files round-trip in a stable layout.
class KeyValues {
public:
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    const std::string& get_raw(const std::string& key) const;
    const std::vector<std::string>& keys() const { return order_; }

    std::string serialize() const;

private:
    std::map<std::string, std::string> items_;
    std::vector<std::string> order_;
};

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);
void save_key_values(const std::string& path, const KeyValues& kv);

// Config keys are plain Hz; conversion to angular rates happens here.
// Required: omega_m_hz gamma_m_hz kappa_ex_hz kappa_0_hz g0_hz detuning_hz
//           abar0 nbar_bath
// Optional with defaults: g_pte_hz=0 g_ptr_hz=0 eta_cryo=1 bs_ratio=0.5
//           phi_lo_rad=0 s_lo_amp=1
SystemParams system_params_from_config(const KeyValues& kv);
KeyValues system_params_to_config(const SystemParams& p);

// Pulse keys: u0_v tau_s t0_s omega_mod_hz phi0_rad v_pi_v p_carrier_w
//             wavelength_nm
PulseSpec pulse_spec_from_config(const KeyValues& kv);

} // namespace optomech
