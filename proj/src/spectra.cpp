#include "optomech/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/linear_response.hpp"
#include "optomech/threading.hpp"

namespace optomech {

namespace {

using cplx = std::complex<double>;

double interp_clamped(const Spectrum& table, double omega) {
    const auto& g = table.grid;
    const auto& v = table.values;
    if (g.empty())
        return 0.0;
    if (omega <= g.front())
        return v.front();
    if (omega >= g.back())
        return v.back();
    const auto it = std::upper_bound(g.begin(), g.end(), omega);
    const size_t i = static_cast<size_t>(it - g.begin());
    const double t = (omega - g[i - 1]) / (g[i] - g[i - 1]);
    return v[i - 1] + t * (v[i] - v[i - 1]);
}

double force_psd(const SystemParams& p, ForceNoise fn) {
    const double occ = fn == ForceNoise::quantum ? p.nbar_bath + 0.5 : p.nbar_bath;
    return 4.0 * occ * p.gamma_m;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2)
        throw ValidationError("spectrum grid needs at least 2 points");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ValidationError("spectrum grid must be strictly increasing");
}

struct RowPair {
    Eigen::Matrix<cplx, 2, kNumChannels> plus, minus;
};

// Both transfer evaluations needed for the covariance contraction at omega.
RowPair rows_at(const SystemParams& p, double omega) {
    return RowPair{transfer_matrix(p, omega).m, transfer_matrix(p, -omega).m};
}

double real_checked(cplx value, double scale, const char* label) {
    if (std::abs(value.imag()) > 1e-9 * std::max(scale, std::abs(value.real())))
        throw NumericalError(std::string(label) +
                             ": output spectrum has a non-real diagonal entry, "
                             "imag residue " + std::to_string(value.imag()));
    return value.real();
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

} // namespace

CovarianceMatrix input_covariance(const SystemParams& p, double omega,
                                  const Spectrum* trn_table, ForceNoise fn) {
    p.validate();
    CovarianceMatrix n = CovarianceMatrix::Zero();
    for (int pair = 0; pair < 4; ++pair) {
        const int a = 2 * pair;
        n(a, a + 1) = 0.5; // vacuum, symmetrized
        n(a + 1, a) = 0.5;
    }
    if (trn_table)
        n(int(Channel::omega_tr), int(Channel::omega_tr)) =
            interp_clamped(*trn_table, std::abs(omega));
    n(int(Channel::f_th), int(Channel::f_th)) = force_psd(p, fn);
    return n;
}

OutputSpectra output_spectra(const SystemParams& p, const std::vector<double>& grid,
                             const Spectrum* trn_table, ForceNoise fn) {
    check_grid(grid);
    p.validate();
    const size_t n = grid.size();
    std::vector<cplx> hh(n), qq(n);
    parallel_for(n, [&](size_t i) {
        const RowPair r = rows_at(p, grid[i]);
        const CovarianceMatrix nin = input_covariance(p, grid[i], trn_table, fn);
        const Eigen::Matrix2cd nout =
            r.plus * nin.cast<cplx>() * r.minus.transpose();
        hh[i] = nout(0, 0);
        qq[i] = nout(1, 1);
    });
    double hh_scale = 0.0, qq_scale = 0.0;
    for (size_t i = 0; i < n; ++i) {
        hh_scale = std::max(hh_scale, std::abs(hh[i].real()));
        qq_scale = std::max(qq_scale, std::abs(qq[i].real()));
    }
    OutputSpectra out;
    out.s_hh.grid = grid;
    out.s_qq.grid = grid;
    out.s_hh.unit_label = "homodyne PSD, model units";
    out.s_qq.unit_label = "quadrature PSD, 1/(rad/s)";
    out.s_hh.values.resize(n);
    out.s_qq.values.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.s_hh.values[i] = real_checked(hh[i], hh_scale, "s_hh");
        out.s_qq.values[i] = real_checked(qq[i], qq_scale, "s_qq");
    }
    return out;
}

SpectraComponents output_spectra_components(const SystemParams& p,
                                            const std::vector<double>& grid,
                                            const Spectrum* trn_table) {
    check_grid(grid);
    p.validate();
    const size_t n = grid.size();
    SpectraComponents c;
    c.grid = grid;
    c.hh_floor.resize(n);
    c.hh_thermal_unit.resize(n);
    c.qq_floor.resize(n);
    c.qq_thermal_unit.resize(n);
    std::vector<double> imag_resid(n, 0.0);
    parallel_for(n, [&](size_t i) {
        const RowPair r = rows_at(p, grid[i]);
        CovarianceMatrix nin = input_covariance(p, grid[i], trn_table, ForceNoise::classical);
        nin(int(Channel::f_th), int(Channel::f_th)) = 0.0;
        const Eigen::Matrix2cd floor = r.plus * nin.cast<cplx>() * r.minus.transpose();
        const int jf = int(Channel::f_th);
        const cplx hh_unit = r.plus(0, jf) * r.minus(0, jf);
        const cplx qq_unit = r.plus(1, jf) * r.minus(1, jf);
        c.hh_floor[i] = floor(0, 0).real();
        c.qq_floor[i] = floor(1, 1).real();
        c.hh_thermal_unit[i] = hh_unit.real();
        c.qq_thermal_unit[i] = qq_unit.real();
        imag_resid[i] = std::max({std::abs(floor(0, 0).imag()), std::abs(floor(1, 1).imag()),
                                  std::abs(hh_unit.imag()), std::abs(qq_unit.imag())});
    });
    double scale = 0.0, resid = 0.0;
    for (size_t i = 0; i < n; ++i) {
        scale = std::max({scale, std::abs(c.hh_floor[i]), std::abs(c.qq_floor[i]),
                          std::abs(c.hh_thermal_unit[i]), std::abs(c.qq_thermal_unit[i])});
        resid = std::max(resid, imag_resid[i]);
    }
    if (scale > 0.0 && resid > 1e-9 * scale)
        throw NumericalError("output_spectra_components: non-real spectral component");
    return c;
}

double shot_noise_level(const SystemParams& p) {
    SystemParams off = p;
    off.g0 = 0.0;
    off.g_pte = 0.0;
    off.g_ptr = 0.0;
    off.nbar_bath = 0.0;
    // Vacuum inputs through a passive chain give a flat PSD; one sample
    // away from any pole fixes the level.
    const double probe = std::max(p.omega_m * 0.37, p.kappa_0 + p.kappa_ex);
    const RowPair r = rows_at(off, probe);
    const CovarianceMatrix nin = input_covariance(off, probe, nullptr, ForceNoise::classical);
    const Eigen::Matrix2cd nout = r.plus * nin.cast<cplx>() * r.minus.transpose();
    return nout(0, 0).real();
}

double occupancy(const SystemParams& p, const std::vector<double>& grid,
                 const Spectrum* trn_table, ForceNoise fn) {
    check_grid(grid);
    if (grid.front() >= 0.0 || grid.back() <= 0.0)
        throw ValidationError("occupancy: grid must cover both signs of frequency");
    const OutputSpectra out = output_spectra(p, grid, trn_table, fn);
    const size_t n = grid.size();
    std::vector<double> wq(n), wp(n);
    for (size_t i = 0; i < n; ++i) {
        wq[i] = out.s_qq.values[i];
        const double ratio = grid[i] / p.omega_m;
        wp[i] = ratio * ratio * out.s_qq.values[i];
    }
    const double span = grid.back() - grid.front();
    const double outer_lo = grid.front() + 0.05 * span;
    const double outer_hi = grid.back() - 0.05 * span;
    auto outer_fraction = [&](const std::vector<double>& w) {
        double outer = 0.0, total = 0.0;
        for (size_t i = 1; i < n; ++i) {
            const double seg = 0.5 * (grid[i] - grid[i - 1]) * (w[i] + w[i - 1]);
            total += seg;
            const double mid = 0.5 * (grid[i] + grid[i - 1]);
            if (mid < outer_lo || mid > outer_hi)
                outer += seg;
        }
        return total > 0.0 ? outer / total : 0.0;
    };
    // The outer tenth of the band must be negligible or the integrals are
    // not converged on this grid.
    if (outer_fraction(wq) > 1e-3 || outer_fraction(wp) > 1e-3)
        throw BandwidthError("occupancy: spectral tails dominate the band edges, "
                             "widen the grid");
    const double q2 = trapezoid(grid, wq) / kTwoPi;
    const double p2 = trapezoid(grid, wp) / kTwoPi;
    return (q2 + p2) / 4.0 - 0.5;
}

SubtractionResult gawbs_subtract(const Spectrum& signal, const Spectrum& reference) {
    if (signal.grid.size() != reference.grid.size())
        throw ShapeError("gawbs_subtract: grids differ in length");
    for (size_t i = 0; i < signal.grid.size(); ++i) {
        const double a = signal.grid[i], b = reference.grid[i];
        if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)))
            throw ShapeError("gawbs_subtract: grids differ at index " + std::to_string(i));
    }
    SubtractionResult r;
    r.spectrum.grid = signal.grid;
    r.spectrum.unit_label = signal.unit_label;
    r.spectrum.values.resize(signal.values.size());
    size_t floored = 0;
    for (size_t i = 0; i < signal.values.size(); ++i) {
        const double v = signal.values[i] - reference.values[i];
        if (v < 0.0) {
            r.spectrum.values[i] = 0.0;
            ++floored;
        } else {
            r.spectrum.values[i] = v;
        }
    }
    r.floored_fraction = signal.values.empty()
                             ? 0.0
                             : static_cast<double>(floored) / signal.values.size();
    return r;
}

CalibrationRef calibrate(const Spectrum& raw_reference, const SystemParams& params_at_reference,
                         const CalibrationTone& tone) {
    check_grid(raw_reference.grid);
    if (raw_reference.values.size() != raw_reference.grid.size())
        throw ShapeError("calibrate: raw reference grid/value size mismatch");
    params_at_reference.validate();
    const auto& grid = raw_reference.grid;
    const size_t n = grid.size();

    std::vector<char> masked(n, 0);
    double tone_response = 0.0;
    if (tone.omega != 0.0) {
        // The tone must show up as the dominant local spike within 3 bins of
        // its nominal position.
        const auto it = std::lower_bound(grid.begin(), grid.end(), tone.omega);
        size_t nominal = static_cast<size_t>(it - grid.begin());
        if (nominal == n || (nominal > 0 && tone.omega - grid[nominal - 1] < grid[nominal] - tone.omega))
            --nominal;
        const size_t lo = nominal >= 3 ? nominal - 3 : 0;
        const size_t hi = std::min(n - 1, nominal + 3);
        const size_t wlo = nominal >= 25 ? nominal - 25 : 0;
        const size_t whi = std::min(n - 1, nominal + 25);
        std::vector<double> ring;
        for (size_t i = wlo; i <= whi; ++i)
            if (i < lo || i > hi)
                ring.push_back(raw_reference.values[i]);
        std::nth_element(ring.begin(), ring.begin() + ring.size() / 2, ring.end());
        const double background = ring[ring.size() / 2];
        size_t spike = lo;
        for (size_t i = lo; i <= hi; ++i)
            if (raw_reference.values[i] > raw_reference.values[spike])
                spike = i;
        const double prominence = raw_reference.values[spike] - background;
        double ring_max = 0.0;
        for (size_t i = wlo; i <= whi; ++i)
            if (i < lo || i > hi)
                ring_max = std::max(ring_max, raw_reference.values[i] - background);
        if (prominence <= 0.0 || prominence < 3.0 * ring_max)
            throw CalibrationError("calibrate: no tone spike within 3 bins of the nominal "
                                   "frequency");
        tone_response = prominence;
        for (size_t i = lo; i <= hi; ++i)
            masked[i] = 1;
    }

    const SpectraComponents comp = output_spectra_components(params_at_reference, grid);
    const double psd = 4.0 * params_at_reference.nbar_bath * params_at_reference.gamma_m;
    if (psd <= 0.0)
        throw ValidationError("calibrate: reference run needs nbar_bath > 0");

    // Joint scale of the raw data onto the floor and thermal shapes; the
    // thermal coefficient is the bin-weighted peak-area ratio.
    double aff = 0.0, aft = 0.0, att = 0.0, bf = 0.0, bt = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (masked[i])
            continue;
        const double f = comp.hh_floor[i];
        const double t = psd * comp.hh_thermal_unit[i];
        const double y = raw_reference.values[i];
        aff += f * f;
        aft += f * t;
        att += t * t;
        bf += f * y;
        bt += t * y;
    }
    const double det = aff * att - aft * aft;
    if (!(std::abs(det) > 1e-14 * std::max(aff * att, 1e-300)))
        throw CalibrationError("calibrate: reference spectrum cannot separate floor and "
                               "thermal peak");
    const double gain_thermal = (aff * bt - aft * bf) / det;
    if (!(gain_thermal > 0.0))
        throw CalibrationError("calibrate: non-positive thermal gain, reference data "
                               "inconsistent with the model");
    CalibrationRef ref;
    ref.known_force_psd = psd;
    ref.reference_modulation_response = tone_response;
    ref.gain = gain_thermal;
    return ref;
}

double transfer_gain(const CalibrationRef& ref, double new_tone_response) {
    if (ref.reference_modulation_response <= 0.0)
        throw CalibrationError("transfer_gain: reference run recorded no tone");
    if (!(new_tone_response > 0.0))
        throw CalibrationError("transfer_gain: new tone response must be > 0");
    return ref.gain * new_tone_response / ref.reference_modulation_response;
}

} // namespace optomech
