#include "optomech/grid.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2 || !(b > a))
        throw ValidationError("linspace: need n >= 2 and b > a");
    std::vector<double> v(n);
    const double h = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i)
        v[i] = a + h * i;
    v.back() = b;
    return v;
}

std::vector<double> mirror_grid(const std::vector<double>& positive) {
    if (positive.empty() || positive.front() <= 0.0)
        throw ValidationError("mirror_grid: positive branch must start above 0");
    std::vector<double> full;
    full.reserve(2 * positive.size());
    for (auto it = positive.rbegin(); it != positive.rend(); ++it)
        full.push_back(-*it);
    full.insert(full.end(), positive.begin(), positive.end());
    return full;
}

std::vector<double> default_spectrum_grid(const SystemParams& p, int n) {
    if (n < 16)
        throw ValidationError("default_spectrum_grid: need at least 16 points");
    const DerivedRates d = derive(p);
    const double half_span = 40.0 * std::max({d.kappa, d.omega_c, 100.0 * p.gamma_m});
    const int n_pos = n / 2;
    double lo = p.omega_m - half_span;
    const double hi = p.omega_m + half_span;
    if (lo <= 0.0) {
        // Keep the branch positive with a half-bin offset instead of 0.
        const double h = hi / n_pos;
        lo = h / 2.0;
    }
    return mirror_grid(linspace(lo, hi, n_pos));
}

namespace {

// Log-spaced points over (a, b], ascending, excluding a itself.
std::vector<double> logspace_open(double a, double b, int n) {
    std::vector<double> v(n);
    const double ratio = std::log(b / a) / n;
    for (int i = 1; i <= n; ++i)
        v[i - 1] = a * std::exp(ratio * i);
    v.back() = b;
    return v;
}

} // namespace

std::vector<double> occupancy_grid(const SystemParams& p, GridQuality q) {
    const DerivedRates d = derive(p);
    // Effective linewidth at this detuning sets the inner resolution; the
    // cooling rate collapses to gamma_cool on the lower sideband.
    const double mismatch = p.detuning + p.omega_m;
    const double gamma_opt = d.omega_c * d.omega_c * d.kappa /
                             (d.kappa * d.kappa + 4.0 * mismatch * mismatch);
    const double gamma_core = p.gamma_m + gamma_opt;
    const int n_core = q == GridQuality::fine ? 8192 : q == GridQuality::standard ? 2048 : 512;
    const int n_wing = q == GridQuality::fine ? 700 : q == GridQuality::standard ? 280 : 120;

    // Two-tier core: a dense linear window resolving the (possibly much
    // narrower) mechanical feature, inside a broad band covering the cavity
    // linewidth and any normal mode splitting. Without the split the broad
    // band would starve the narrow peak of points in weak coupling.
    const double inner_half = 40.0 * gamma_core;
    const double outer_half = std::max({2.5 * (d.kappa + d.omega_c), 1e-3 * p.omega_m,
                                        inner_half});
    // The low cutoff contributes a missing chunk ~ S_ff/(2 pi floor_lo) to
    // <q^2>; at omega_m/400 it stays below 1e-4 of the total even for
    // strongly cooled states.
    const double floor_lo = p.omega_m / 400.0;
    const double band_hi = p.omega_m + outer_half;

    // Momentum integrand falls off as 1/omega^2; carry the wing far enough
    // that the truncated tail stays below the integration tolerance.
    const double tail_hi = std::max(band_hi * 4.0, p.omega_m + 4.0e4 * gamma_core);

    std::vector<double> pos;
    pos.reserve(n_core + 2 * n_wing);
    const double band_lo = p.omega_m - outer_half;
    if (band_lo > floor_lo * (1.0 + 1e-12)) {
        auto low_wing = logspace_open(floor_lo, band_lo, n_wing);
        low_wing.pop_back(); // band supplies the shared endpoint
        pos.push_back(floor_lo);
        pos.insert(pos.end(), low_wing.begin(), low_wing.end());
    }
    if (outer_half > 1.05 * inner_half) {
        const int n_inner = (n_core * 3) / 5;
        const int n_side = (n_core - n_inner) / 2;
        // Shoulders: log-spaced distance from the mechanical line, mapped to
        // both sides of the inner window.
        const auto dist = logspace_open(inner_half, outer_half, n_side);
        for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
            const double w = p.omega_m - *it;
            if (w > floor_lo)
                pos.push_back(w);
        }
        const double in_lo = std::max(p.omega_m - inner_half, floor_lo);
        const auto inner = linspace(in_lo, p.omega_m + inner_half, n_inner);
        pos.insert(pos.end(), inner.begin(), inner.end());
        for (double dd : dist)
            pos.push_back(p.omega_m + dd);
    } else {
        const double in_lo = std::max(p.omega_m - outer_half, floor_lo);
        const auto core = linspace(in_lo, band_hi, n_core);
        pos.insert(pos.end(), core.begin(), core.end());
    }
    const auto high_wing = logspace_open(band_hi, tail_hi, n_wing);
    pos.insert(pos.end(), high_wing.begin(), high_wing.end());

    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end(),
                          [](double a, double b) { return b - a < 1e-9 * std::abs(b); }),
              pos.end());
    return mirror_grid(pos);
}

} // namespace optomech
