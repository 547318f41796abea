#include "optomech/coherent.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/errors.hpp"
#include "optomech/linear_response.hpp"
#include "optomech/optim.hpp"
#include "optomech/threading.hpp"

namespace optomech {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

} // namespace

CoherentTrace coherent_response(const SystemParams& p, const std::vector<double>& grid) {
    p.validate();
    if (grid.empty())
        throw ValidationError("coherent_response: empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ValidationError("coherent_response: grid must be strictly increasing");
    if (p.bs_ratio <= 0.0)
        throw ValidationError("coherent_response: bs_ratio = 0 leaves no drive path");
    const cplx s_las(p.s_lo_amp / std::sqrt(p.bs_ratio), 0.0);

    CoherentTrace tr;
    tr.grid = grid;
    tr.response.resize(grid.size());
    parallel_for(grid.size(), [&](size_t i) {
        const ResponseMatrix R = transfer_matrix(p, grid[i]);
        tr.response[i] = R.m(0, int(Channel::s_las)) * (kI * s_las) +
                         R.m(0, int(Channel::s_las_dag)) * (-kI * std::conj(s_las));
    });
    return tr;
}

OmitWidth omit_dip_width(const SystemParams& p) {
    const DerivedRates d = derive(p);
    const double mismatch = p.detuning + p.omega_m;
    OmitWidth w;
    w.width = p.gamma_m + d.omega_c * d.omega_c * d.kappa /
                              (d.kappa * d.kappa + 4.0 * mismatch * mismatch);
    w.weak_coupling_valid = d.omega_c <= d.kappa / 2.0;
    return w;
}

DipMeasurement measure_dip_width(const CoherentTrace& trace, double center_hint,
                                 double width_hint) {
    const size_t n = trace.grid.size();
    if (n < 16 || trace.response.size() != n)
        throw ValidationError("measure_dip_width: trace too short or inconsistent");
    if (!(width_hint > 0.0))
        throw ValidationError("measure_dip_width: width_hint must be > 0");

    std::vector<double> mag(n);
    for (size_t i = 0; i < n; ++i)
        mag[i] = std::abs(trace.response[i]);

    const double wlo = center_hint - 10.0 * width_hint;
    const double whi = center_hint + 10.0 * width_hint;
    std::vector<double> bx, by;
    size_t win_lo = n, win_hi = 0;
    for (size_t i = 0; i < n; ++i) {
        const double w = trace.grid[i];
        if (w < wlo || w > whi)
            continue;
        win_lo = std::min(win_lo, i);
        win_hi = std::max(win_hi, i);
        if (std::abs(w - center_hint) > 3.0 * width_hint) {
            bx.push_back(w);
            by.push_back(mag[i]);
        }
    }
    if (win_lo >= win_hi || bx.size() < 8)
        throw ValidationError("measure_dip_width: window holds too few points, grid "
                              "too coarse around the dip");

    // Local cavity background |A| / sqrt((w - w0)^2 + (hw)^2); over a window
    // much narrower than the cavity line a 3-parameter magnitude Lorentzian
    // absorbs curvature and slope.
    double m0 = 0.0;
    for (double v : by)
        m0 = std::max(m0, v);
    Eigen::VectorXd theta(3);
    theta << m0, center_hint, 40.0 * width_hint;
    LMOptions opts;
    opts.max_iterations = 80;
    opts.step_scale.resize(3);
    opts.step_scale << std::max(m0, 1e-30), std::abs(center_hint) + width_hint, width_hint;
    auto model = [&](const Eigen::VectorXd& t, double w) {
        const double hw = std::max(std::abs(t[2]), 1e-3 * width_hint);
        return t[0] * hw / std::sqrt((w - t[1]) * (w - t[1]) + hw * hw);
    };
    const LMResult fit = levenberg_marquardt(
        [&](const Eigen::VectorXd& t) {
            Eigen::VectorXd r(bx.size());
            for (size_t i = 0; i < bx.size(); ++i)
                r[i] = model(t, bx[i]) - by[i];
            return r;
        },
        theta, opts);

    // Prominence against the fitted background, minimum inside the window.
    size_t imin = win_lo;
    for (size_t i = win_lo; i <= win_hi; ++i)
        if (mag[i] < mag[imin])
            imin = i;
    const double background_at_min = model(fit.theta, trace.grid[imin]);
    const double prominence = background_at_min - mag[imin];
    if (!(prominence > 0.0))
        throw NumericalError("measure_dip_width: no dip below the background");

    // Width extraction works on 1 - (|T|/bg)^2. For an amplitude window
    // bg*|1 - c*L(w)| this quantity is a Lorentzian whose FWHM equals the
    // window's width parameter at any depth; the half width of the amplitude
    // trace itself shrinks toward 1/sqrt(3) of it as the dip deepens.
    auto depth = [&](size_t i) {
        const double r = mag[i] / model(fit.theta, trace.grid[i]);
        return 1.0 - r * r;
    };
    const double level = 0.5 * depth(imin);
    // Crossings of the half-depth level on either side of the minimum,
    // linearly interpolated between bins.
    double left = trace.grid[win_lo], right = trace.grid[win_hi];
    bool found_left = false, found_right = false;
    for (size_t i = imin; i > win_lo; --i) {
        const double d1 = depth(i), d0 = depth(i - 1);
        if (d1 >= level && d0 < level) {
            const double t = (level - d0) / (d1 - d0);
            left = trace.grid[i - 1] + t * (trace.grid[i] - trace.grid[i - 1]);
            found_left = true;
            break;
        }
    }
    for (size_t i = imin; i < win_hi; ++i) {
        const double d0 = depth(i), d1 = depth(i + 1);
        if (d0 >= level && d1 < level) {
            const double t = (level - d0) / (d1 - d0);
            right = trace.grid[i] + t * (trace.grid[i + 1] - trace.grid[i]);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right)
        throw NumericalError("measure_dip_width: half-depth level never recrossed, "
                             "window too narrow");
    DipMeasurement dm;
    dm.center = trace.grid[imin];
    if (imin > win_lo && imin < win_hi) {
        // Sub-bin minimum from the parabola through the three lowest samples.
        const double ym = mag[imin - 1], y0 = mag[imin], yp = mag[imin + 1];
        const double curv = ym - 2.0 * y0 + yp;
        if (curv > 0.0)
            dm.center += 0.5 * (ym - yp) / curv * (trace.grid[imin + 1] - trace.grid[imin]);
    }
    dm.width = right - left;
    dm.prominence = prominence;
    return dm;
}

} // namespace optomech
