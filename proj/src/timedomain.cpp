#include "optomech/timedomain.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/basis.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/fft.hpp"
#include "optomech/linear_response.hpp"
#include "optomech/threading.hpp"

namespace optomech {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

} // namespace

void PulseSpec::validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(u0) || u0 < 0.0)
        throw ValidationError("pulse: u0 must be finite and >= 0");
    if (bad(tau) || tau <= 0.0)
        throw ValidationError("pulse: tau must be finite and > 0");
    if (bad(t0))
        throw ValidationError("pulse: t0 must be finite");
    if (bad(omega_mod) || omega_mod <= 0.0)
        throw ValidationError("pulse: omega_mod must be finite and > 0");
    if (bad(phi0))
        throw ValidationError("pulse: phi0 must be finite");
    if (bad(v_pi) || v_pi <= 0.0)
        throw ValidationError("pulse: v_pi must be finite and > 0");
    if (bad(p_carrier) || p_carrier < 0.0)
        throw ValidationError("pulse: p_carrier must be finite and >= 0");
    if (bad(omega_optical) || omega_optical <= 0.0)
        throw ValidationError("pulse: omega_optical must be finite and > 0");
}

double PulseSpec::peak_depth() const {
    return kPi * u0 / v_pi;
}

double modulation_depth(const PulseSpec& s, double t) {
    const double x = (t - s.t0) / s.tau;
    return s.peak_depth() * std::exp(-x * x);
}

PulsePhotons pulse_photons(const PulseSpec& s) {
    s.validate();
    const double hbar = codata().hbar;
    const double flux = s.p_carrier / (hbar * s.omega_optical);
    PulsePhotons out;
    out.closed_form = std::pow(kPi, 2.5) / (4.0 * std::sqrt(2.0)) * s.tau * flux *
                      (s.u0 / s.v_pi) * (s.u0 / s.v_pi);
    // Independent check: sideband photon rate is flux * (beta/2)^2 for weak
    // modulation; integrate it across the envelope.
    const int n = 4001;
    const double half = 8.0 * s.tau;
    const double h = 2.0 * half / (n - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = s.t0 - half + h * i;
        const double b = modulation_depth(s, t);
        const double y = flux * b * b / 4.0;
        acc += (i == 0 || i == n - 1) ? 0.5 * y : y;
    }
    out.quadrature = acc * h;
    return out;
}

TimeTrace pulse_response(const SystemParams& p, const PulseSpec& s,
                         const std::vector<double>& times, const PulseResponseOptions& opts) {
    p.validate();
    s.validate();
    const size_t n = times.size();
    if (n < 16)
        throw ValidationError("pulse_response: need at least 16 samples");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0))
        throw ValidationError("pulse_response: times must increase");
    for (size_t i = 1; i < n; ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt)
            throw ValidationError("pulse_response: time grid must be uniform");
    const double kappa = p.kappa_ex + p.kappa_0;
    if (kTwoPi / dt <= 4.0 * (p.omega_m + kappa))
        throw ValidationError("pulse_response: sample rate must exceed 4 (omega_m + kappa) "
                              "/ 2 pi");
    if (s.omega_mod >= 0.9 * kPi / dt)
        throw ValidationError("pulse_response: modulation carrier too close to Nyquist");

    // Pad with the memory of the slowest mode so the circular tail is
    // negligible: exp(-20) of the peak.
    // Both hybrid modes carry a decay rate; the slower one sets how much
    // ringdown the padding must swallow.
    const NormalModes nm = normal_mode_frequencies(p);
    const double slowest_amp = std::min(-nm.lower.real(), -nm.upper.real());
    const double memory = 20.0 / std::max(slowest_amp, 1.0 / (1e6 * n * dt));
    size_t total = next_pow2(n + static_cast<size_t>(std::ceil(memory / dt)));
    const size_t kMaxSamples = size_t(1) << 22;
    if (total > kMaxSamples)
        total = kMaxSamples; // ringdowns longer than this need a longer window anyway
    if (total < n)
        total = next_pow2(n);

    std::vector<cplx> drive(total, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double t = times[i];
        drive[i] = modulation_depth(s, t) * std::sin(s.omega_mod * t + s.phi0);
    }
    fft_pow2(drive, false);

    // Transfer functions on the positive FFT bins; negative bins follow from
    // the reality symmetry T(-w) = conj(T(w)), which holds because dh and dq
    // are Hermitian observables.
    const double dw = kTwoPi / (total * dt);
    const size_t n_half = total / 2;
    if (p.bs_ratio <= 0.0)
        throw ValidationError("pulse_response: bs_ratio = 0 leaves no drive path");
    const cplx s_las(p.s_lo_amp / std::sqrt(p.bs_ratio), 0.0);
    std::vector<cplx> th(n_half + 1, 0.0), tq(n_half + 1, 0.0);
    parallel_for(n_half, [&](size_t k1) {
        const size_t k = k1 + 1;
        const double w = dw * static_cast<double>(k);
        const ResponseMatrix R = transfer_matrix(p, w);
        const cplx in = kI * s_las, in_dag = -kI * std::conj(s_las);
        th[k] = R.m(0, int(Channel::s_las)) * in + R.m(0, int(Channel::s_las_dag)) * in_dag;
        tq[k] = R.m(1, int(Channel::s_las)) * in + R.m(1, int(Channel::s_las_dag)) * in_dag;
    });
    // DC bin: the Gaussian-windowed sine carries no weight there and the
    // photothermal poles exclude w = 0, so the response is dropped.
    th[0] = 0.0;
    tq[0] = 0.0;

    double band_lo = opts.band_lo, band_hi = opts.band_hi;
    if (opts.bandpass) {
        if (band_lo <= 0.0)
            band_lo = kTwoPi * 25e6;
        if (band_hi <= 0.0)
            band_hi = kTwoPi * 125e6;
        if (!(band_hi > band_lo))
            throw ValidationError("pulse_response: band_hi must exceed band_lo");
    }
    auto band_gain = [&](double w) {
        if (!opts.bandpass)
            return 1.0;
        const double r_hi = std::pow(w / band_hi, 8);
        const double r_lo = std::pow(w / band_lo, 8);
        return std::sqrt(1.0 / (1.0 + r_hi) * (r_lo / (1.0 + r_lo)));
    };

    // DFT bin k synthesizes e^{+i w_k t}, which in the e^{-i Omega t} model
    // convention is the response at Omega = -w_k; the positive bins therefore
    // carry the conjugate transfer. Getting this backwards time-reverses the
    // ringdown.
    std::vector<cplx> hw(total), qw(total);
    hw[0] = 0.0;
    qw[0] = 0.0;
    for (size_t k = 1; k <= n_half; ++k) {
        const double w = dw * static_cast<double>(k);
        hw[k] = drive[k] * std::conj(th[k]) * band_gain(w);
        qw[k] = drive[k] * std::conj(tq[k]);
        if (k < n_half) {
            hw[total - k] = drive[total - k] * th[k] * band_gain(w);
            qw[total - k] = drive[total - k] * tq[k];
        }
    }
    // Nyquist bin already set at k = n_half; keep it real-compatible by
    // construction (drive there is real-symmetric and T at Nyquist is used
    // as-is; its weight is negligible for resolved pulses).
    fft_pow2(hw, true);
    fft_pow2(qw, true);

    TimeTrace out;
    out.times = times;
    out.drive.resize(n);
    out.homodyne.resize(n);
    out.displacement.resize(n);
    double imag_peak = 0.0, real_peak = 0.0;
    for (size_t i = 0; i < n; ++i) {
        out.drive[i] = modulation_depth(s, times[i]);
        out.homodyne[i] = hw[i].real();
        out.displacement[i] = qw[i].real();
        imag_peak = std::max({imag_peak, std::abs(hw[i].imag()), std::abs(qw[i].imag())});
        real_peak = std::max({real_peak, std::abs(hw[i].real()), std::abs(qw[i].real())});
    }
    if (real_peak > 0.0 && imag_peak > 1e-6 * real_peak)
        throw NumericalError("pulse_response: reality symmetry violated in synthesis");

    // Truncation check per channel: the ringdown must have died before the
    // window ends, or the trace (and any decay fit on it) is cut short.
    const size_t tail_start = n - std::max<size_t>(n / 50, 2);
    for (const std::vector<double>* ch : {&out.homodyne, &out.displacement}) {
        double peak = 0.0, tail = 0.0;
        for (size_t i = 0; i < n; ++i)
            peak = std::max(peak, std::abs((*ch)[i]));
        for (size_t i = tail_start; i < n; ++i)
            tail = std::max(tail, std::abs((*ch)[i]));
        if (peak > 0.0 && tail > 1e-3 * peak) {
            const double suggested = s.t0 + 12.0 / slowest_amp;
            throw BandwidthError("pulse_response: response has not decayed by the end of "
                                 "the window; extend it to about t = " +
                                 std::to_string(suggested) + " s");
        }
    }
    return out;
}

std::vector<double> hilbert_envelope(const std::vector<double>& x) {
    const size_t n = x.size();
    if (n < 4)
        throw ValidationError("hilbert_envelope: series too short");
    const size_t total = next_pow2(n);
    std::vector<cplx> a(total, 0.0);
    for (size_t i = 0; i < n; ++i)
        a[i] = x[i];
    fft_pow2(a, false);
    // One-sided spectrum doubles positive frequencies.
    for (size_t k = 1; k < total / 2; ++k)
        a[k] *= 2.0;
    for (size_t k = total / 2 + 1; k < total; ++k)
        a[k] = 0.0;
    fft_pow2(a, true);
    std::vector<double> env(n);
    for (size_t i = 0; i < n; ++i)
        env[i] = std::abs(a[i]);
    return env;
}

namespace {

DecayFit log_linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t m = t.size();
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (size_t i = 0; i < m; ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double det = m * stt - st * st;
    if (!(std::abs(det) > 0.0))
        throw NumericalError("envelope decay fit: degenerate time window");
    const double slope = (m * sty - st * sy) / det;
    const double icept = (sy - slope * st) / m;
    double rss = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double r = y[i] - (icept + slope * t[i]);
        rss += r * r;
    }
    DecayFit f;
    f.rate = -slope;
    f.residual_rms = std::sqrt(rss / m);
    return f;
}

} // namespace

DecayFit fit_envelope_decay(const std::vector<double>& times, const std::vector<double>& env,
                            double t_start, double t_end) {
    if (times.size() != env.size())
        throw ValidationError("fit_envelope_decay: size mismatch");
    std::vector<double> t, y;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_start || times[i] > t_end)
            continue;
        if (env[i] <= 0.0)
            continue;
        t.push_back(times[i]);
        y.push_back(std::log(env[i]));
    }
    if (t.size() < 8)
        throw ValidationError("fit_envelope_decay: too few samples in window");
    return log_linear_fit(t, y);
}

DecayFit fit_envelope_maxima_decay(const std::vector<double>& times,
                                   const std::vector<double>& env, double t_start,
                                   double t_end) {
    if (times.size() != env.size())
        throw ValidationError("fit_envelope_maxima_decay: size mismatch");
    std::vector<double> t, y;
    for (size_t i = 1; i + 1 < times.size(); ++i) {
        if (times[i] < t_start || times[i] > t_end)
            continue;
        if (env[i] > env[i - 1] && env[i] >= env[i + 1] && env[i] > 0.0) {
            t.push_back(times[i]);
            y.push_back(std::log(env[i]));
        }
    }
    if (t.size() < 3)
        throw ValidationError("fit_envelope_maxima_decay: found fewer than 3 envelope "
                              "maxima in window");
    return log_linear_fit(t, y);
}

} // namespace optomech
