#include "optomech/linear_response.hpp"

#include <cmath>
#include <limits>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

struct Chain {
    double sqrt_kex, sqrt_k0;
    double sqrt_r, sqrt_1mr;     // signal splitter
    double sqrt_eta, sqrt_1meta; // detection loss splitter
    cplx abar;
    cplx s_las, s_lo, s_sig;     // mean fields through the same chain
};

Chain make_chain(const SystemParams& p, const DerivedRates& d) {
    Chain c;
    c.sqrt_kex = std::sqrt(p.kappa_ex);
    c.sqrt_k0 = std::sqrt(p.kappa_0);
    c.sqrt_r = std::sqrt(p.bs_ratio);
    c.sqrt_1mr = std::sqrt(1.0 - p.bs_ratio);
    c.sqrt_eta = std::sqrt(p.eta_cryo);
    c.sqrt_1meta = std::sqrt(1.0 - p.eta_cryo);
    c.abar = d.abar;
    // The laser phase is the global reference, so s_las is real. s_lo_amp
    // prescribes the local oscillator amplitude behind the splitter.
    c.s_las = p.bs_ratio > 0.0 ? cplx(p.s_lo_amp / c.sqrt_r, 0.0) : cplx(0.0, 0.0);
    c.s_lo = c.sqrt_r * c.s_las;
    const cplx s_out = c.sqrt_1mr * c.s_las - c.sqrt_kex * c.abar;
    c.s_sig = c.sqrt_eta * s_out;
    return c;
}

// Internal system matrix A and input matrix B such that
// A * (da, da_dag, dq) = B * inputs. The da_dag row is the conjugate of the
// da row taken at -omega, which flips the sign of the 1/omega photothermal
// factor along with every explicit i.
void assemble(const SystemParams& p, const DerivedRates& d, const Chain& c, double omega,
              Eigen::Matrix3cd& A, Eigen::Matrix<cplx, 3, kNumChannels>& B) {
    if (omega == 0.0 && (p.g_pte != 0.0 || p.g_ptr != 0.0))
        throw ValidationError("solve_internal: omega = 0 lies outside the single-pole "
                              "photothermal model");

    const double kappa = d.kappa;
    const cplx abar = c.abar;
    const cplx abar_c = std::conj(abar);
    const double nbar_c = d.nbar_cavity;

    const cplx denom_a = -kI * (p.detuning + omega) + kappa / 2.0;
    const cplx denom_adag = -kI * (-p.detuning + omega) + kappa / 2.0;
    const cplx denom_q = cplx(p.omega_m * p.omega_m - omega * omega, -omega * p.gamma_m) / p.omega_m;

    // 1/omega single-pole factors; guarded so omega = 0 with both strengths
    // zero stays well defined.
    const double ptr = p.g_ptr != 0.0 ? p.g_ptr * p.omega_m / omega : 0.0;
    const double pte = p.g_pte != 0.0 ? p.g_pte * p.omega_m / omega : 0.0;

    A.setZero();
    A(0, 0) = denom_a - ptr * nbar_c;
    A(0, 1) = -ptr * abar * abar;
    A(0, 2) = kI * p.g0 * abar;
    A(1, 0) = ptr * abar_c * abar_c;
    A(1, 1) = denom_adag + ptr * nbar_c;
    A(1, 2) = -kI * p.g0 * abar_c;
    const cplx force_coupling = 2.0 * cplx(p.g0, pte);
    A(2, 0) = force_coupling * abar_c;
    A(2, 1) = force_coupling * abar;
    A(2, 2) = denom_q;

    B.setZero();
    const double in_las = c.sqrt_kex * c.sqrt_1mr;
    const double in_bs = -c.sqrt_kex * c.sqrt_r;
    B(0, int(Channel::s_las)) = in_las;
    B(0, int(Channel::s_bs)) = in_bs;
    B(0, int(Channel::s_cav)) = c.sqrt_k0;
    B(0, int(Channel::omega_tr)) = -kI * abar;
    B(1, int(Channel::s_las_dag)) = in_las;
    B(1, int(Channel::s_bs_dag)) = in_bs;
    B(1, int(Channel::s_cav_dag)) = c.sqrt_k0;
    B(1, int(Channel::omega_tr)) = kI * abar_c;
    B(2, int(Channel::f_th)) = 1.0;
}

Eigen::Matrix<cplx, 3, kNumChannels> solve_all_channels(const SystemParams& p,
                                                        const DerivedRates& d,
                                                        const Chain& c, double omega) {
    Eigen::Matrix3cd A;
    Eigen::Matrix<cplx, 3, kNumChannels> B;
    assemble(p, d, c, omega, A, B);
    Eigen::PartialPivLU<Eigen::Matrix3cd> lu(A);
    // Pivot collapse flags an effectively singular operating point (possible
    // only for degenerate parameter combinations, validation keeps the usual
    // ones away from it).
    const auto& packed = lu.matrixLU();
    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        const double piv = std::abs(packed(i, i));
        pmax = std::max(pmax, piv);
        pmin = std::min(pmin, piv);
    }
    Eigen::Matrix<cplx, 3, kNumChannels> X = lu.solve(B);
    if (!X.allFinite() || pmin <= 1e-14 * pmax)
        throw NumericalError("solve_internal: internal response system is singular at "
                             "omega = " + std::to_string(omega));
    return X;
}

} // namespace

InternalState solve_internal(const SystemParams& p, double omega, const InputVector& in) {
    const DerivedRates d = derive(p);
    const Chain c = make_chain(p, d);
    const auto X = solve_all_channels(p, d, c, omega);
    InternalState st{};
    for (int j = 0; j < kNumChannels; ++j) {
        st.delta_a += X(0, j) * in[j];
        st.delta_a_dag += X(1, j) * in[j];
        st.delta_q += X(2, j) * in[j];
    }
    return st;
}

ResponseMatrix transfer_matrix(const SystemParams& p, double omega) {
    const DerivedRates d = derive(p);
    const Chain c = make_chain(p, d);
    const auto X = solve_all_channels(p, d, c, omega);

    ResponseMatrix R;
    R.omega = omega;
    R.m.setZero();

    const cplx lo_gain_dag = c.s_lo * std::exp(kI * p.phi_lo);        // weights ds_sig_dag
    const cplx lo_gain = std::conj(c.s_lo) * std::exp(-kI * p.phi_lo); // weights ds_sig
    const cplx sig_gain_dag = c.s_sig * std::exp(-kI * p.phi_lo);     // weights ds_lo_dag
    const cplx sig_gain = std::conj(c.s_sig) * std::exp(kI * p.phi_lo);

    for (int j = 0; j < kNumChannels; ++j) {
        // Direct splitter feed-through to the signal and LO ports.
        cplx ds_in = 0.0, ds_in_dag = 0.0, ds_lo = 0.0, ds_lo_dag = 0.0;
        switch (Channel(j)) {
        case Channel::s_las:
            ds_in = c.sqrt_1mr;
            ds_lo = c.sqrt_r;
            break;
        case Channel::s_las_dag:
            ds_in_dag = c.sqrt_1mr;
            ds_lo_dag = c.sqrt_r;
            break;
        case Channel::s_bs:
            ds_in = -c.sqrt_r;
            ds_lo = c.sqrt_1mr;
            break;
        case Channel::s_bs_dag:
            ds_in_dag = -c.sqrt_r;
            ds_lo_dag = c.sqrt_1mr;
            break;
        default:
            break;
        }
        // Input-output at the cavity, then the detection loss splitter.
        cplx ds_sig = c.sqrt_eta * (ds_in - c.sqrt_kex * X(0, j));
        cplx ds_sig_dag = c.sqrt_eta * (ds_in_dag - c.sqrt_kex * X(1, j));
        if (Channel(j) == Channel::s_cryo)
            ds_sig += c.sqrt_1meta;
        if (Channel(j) == Channel::s_cryo_dag)
            ds_sig_dag += c.sqrt_1meta;

        R.m(0, j) = lo_gain_dag * ds_sig_dag + lo_gain * ds_sig +
                    sig_gain_dag * ds_lo_dag + sig_gain * ds_lo;
        R.m(1, j) = X(2, j);
    }
    return R;
}

NormalModes normal_mode_frequencies(const SystemParams& p) {
    const DerivedRates d = derive(p);
    const cplx a(-d.kappa / 2.0, p.detuning);
    const cplx b(-p.gamma_m / 2.0, -p.omega_m);
    const cplx g(0.0, -d.omega_c / 2.0);
    const cplx mean = (a + b) / 2.0;
    const cplx split = std::sqrt((a - b) * (a - b) / 4.0 + g * g);
    NormalModes nm;
    nm.lower = mean - split;
    nm.upper = mean + split;
    if (nm.lower.imag() > nm.upper.imag())
        std::swap(nm.lower, nm.upper);
    return nm;
}

} // namespace optomech
