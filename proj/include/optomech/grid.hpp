#pragma once

#include <vector>

#include "optomech/params.hpp"

namespace optomech {

std::vector<double> linspace(double a, double b, int n);

// Appends the mirrored negative branch; input must be strictly increasing
// and positive. Result is strictly increasing and symmetric about 0.
std::vector<double> mirror_grid(const std::vector<double>& positive);

// Default emission grid: n points total, the positive branch spanning
// omega_m +/- 40 max(kappa, omega_c, 100 gamma_m) clipped to stay positive
// with a half-bin offset, mirrored to negative frequencies.
std::vector<double> default_spectrum_grid(const SystemParams& p, int n = 1 << 14);

// coarse trades integration bias (~1e-3) for speed; meant for Monte-Carlo
// inner loops where only the spread across draws matters.
enum class GridQuality { coarse, standard, fine };

// Non-uniform symmetric grid for occupancy integrals: a dense linear core
// around +/- omega_m wide enough for the effective linewidth and any normal
// mode splitting, log-spaced wings for the slowly decaying momentum tail.
std::vector<double> occupancy_grid(const SystemParams& p, GridQuality q = GridQuality::standard);

} // namespace optomech
