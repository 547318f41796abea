#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/linear_response.hpp"
#include "optomech/params.hpp"

#include "test_util.hpp"

using namespace optomech;
using testutil::rel_err;
using testutil::sideband_point;
using cplx = std::complex<double>;

namespace {

constexpr cplx I{0.0, 1.0};

// Longhand restatement of the three coupled equations, solved by Cramer's
// rule. Everything is written out from the model definition so an index or
// sign slip in the library assembly cannot hide.
struct Brute3 {
    cplx da, dadag, dq;
};

Brute3 brute_solve(const SystemParams& p, double w, const cplx& r0, const cplx& r1,
                   const cplx& r2) {
    const double kappa = p.kappa_0 + p.kappa_ex;
    const cplx abar = p.abar0 * (kappa / 2.0) / cplx(kappa / 2.0, -p.detuning);
    const double ptr = p.g_ptr != 0.0 ? p.g_ptr * p.omega_m / w : 0.0;
    const double pte = p.g_pte != 0.0 ? p.g_pte * p.omega_m / w : 0.0;

    const cplx a00 = -I * (p.detuning + w) + kappa / 2.0 - ptr * std::norm(abar);
    const cplx a01 = -ptr * abar * abar;
    const cplx a02 = I * p.g0 * abar;
    const cplx a10 = ptr * std::conj(abar) * std::conj(abar);
    const cplx a11 = -I * (-p.detuning + w) + kappa / 2.0 + ptr * std::norm(abar);
    const cplx a12 = -I * p.g0 * std::conj(abar);
    const cplx a20 = 2.0 * cplx(p.g0, pte) * std::conj(abar);
    const cplx a21 = 2.0 * cplx(p.g0, pte) * abar;
    const cplx a22 = cplx(p.omega_m * p.omega_m - w * w, -w * p.gamma_m) / p.omega_m;

    const cplx det = a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
                     a02 * (a10 * a21 - a11 * a20);
    Brute3 out;
    out.da = (r0 * (a11 * a22 - a12 * a21) - a01 * (r1 * a22 - a12 * r2) +
              a02 * (r1 * a21 - a11 * r2)) /
             det;
    out.dadag = (a00 * (r1 * a22 - a12 * r2) - r0 * (a10 * a22 - a12 * a20) +
                 a02 * (a10 * r2 - r1 * a20)) /
                det;
    out.dq = (a00 * (a11 * r2 - r1 * a21) - a01 * (a10 * r2 - r1 * a20) +
              r0 * (a10 * a21 - a11 * a20)) /
             det;
    return out;
}

// Mechanical susceptibility with the cavity eliminated by hand:
// D_eff = D_q - 2 i g0^2 nbar_c (1/denom_a - 1/denom_adag).
cplx effective_mech_denominator(const SystemParams& p, double w) {
    const double kappa = p.kappa_0 + p.kappa_ex;
    const cplx abar = p.abar0 * (kappa / 2.0) / cplx(kappa / 2.0, -p.detuning);
    const cplx denom_a = -I * (p.detuning + w) + kappa / 2.0;
    const cplx denom_adag = -I * (-p.detuning + w) + kappa / 2.0;
    const cplx dq = cplx(p.omega_m * p.omega_m - w * w, -w * p.gamma_m) / p.omega_m;
    return dq - 2.0 * I * p.g0 * p.g0 * std::norm(abar) * (1.0 / denom_a - 1.0 / denom_adag);
}

InputVector unit_input(Channel c) {
    InputVector in{};
    in[int(c)] = 1.0;
    return in;
}

} // namespace

TEST_CASE("internal solve agrees with a longhand Cramer elimination") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        SystemParams p = sideband_point();
        p.detuning = -p.omega_m * (0.5 + u(rng));
        p.abar0 = 2.0e3 + 2.0e4 * u(rng);
        p.g_pte = (trial % 2) ? kTwoPi * (u(rng) - 0.5) * 400.0 : 0.0;
        p.g_ptr = (trial % 3) ? kTwoPi * u(rng) * 200.0 : 0.0;
        const double w = p.omega_m * (0.2 + 1.6 * u(rng));

        const double in_las = std::sqrt(p.kappa_ex) * std::sqrt(1.0 - p.bs_ratio);
        const double kappa = p.kappa_0 + p.kappa_ex;
        const cplx abar = p.abar0 * (kappa / 2.0) / cplx(kappa / 2.0, -p.detuning);

        // Laser amplitude channel feeds only the field equation.
        InternalState st = solve_internal(p, w, unit_input(Channel::s_las));
        Brute3 b = brute_solve(p, w, in_las, 0.0, 0.0);
        CHECK(std::abs(st.delta_a - b.da) < 1e-12 * std::abs(b.da) + 1e-18);
        CHECK(std::abs(st.delta_a_dag - b.dadag) < 1e-12 * std::abs(b.dadag) + 1e-18);
        CHECK(std::abs(st.delta_q - b.dq) < 1e-12 * std::abs(b.dq) + 1e-18);

        // Thermal force feeds only the oscillator equation.
        st = solve_internal(p, w, unit_input(Channel::f_th));
        b = brute_solve(p, w, 0.0, 0.0, 1.0);
        CHECK(std::abs(st.delta_q - b.dq) < 1e-12 * std::abs(b.dq) + 1e-18);
        CHECK(std::abs(st.delta_a - b.da) < 1e-12 * std::abs(b.da) + 1e-18);

        // Cavity frequency noise drives both field rows with the mean field.
        st = solve_internal(p, w, unit_input(Channel::omega_tr));
        b = brute_solve(p, w, -I * abar, I * std::conj(abar), 0.0);
        CHECK(std::abs(st.delta_a - b.da) < 1e-12 * std::abs(b.da) + 1e-18);
        CHECK(std::abs(st.delta_q - b.dq) < 1e-12 * std::abs(b.dq) + 1e-18);
    }
}

TEST_CASE("decoupled oscillator reduces to the bare susceptibility") {
    SystemParams p = sideband_point();
    p.g0 = 0.0;
    for (double w : {0.2 * p.omega_m, 0.999 * p.omega_m, p.omega_m, 1.4 * p.omega_m}) {
        const InternalState st = solve_internal(p, w, unit_input(Channel::f_th));
        const cplx want = p.omega_m / cplx(p.omega_m * p.omega_m - w * w, -w * p.gamma_m);
        CHECK(std::abs(st.delta_q - want) < 1e-13 * std::abs(want));
        CHECK(std::abs(st.delta_a) == 0.0);
    }
}

TEST_CASE("decoupled cavity reduces to the bare Lorentzian response") {
    SystemParams p = sideband_point();
    p.g0 = 0.0;
    for (double w : {0.0, 0.3 * p.omega_m, p.omega_m}) {
        const InternalState st = solve_internal(p, w, unit_input(Channel::s_las));
        const double kappa = p.kappa_0 + p.kappa_ex;
        const cplx want = std::sqrt(p.kappa_ex) * std::sqrt(1.0 - p.bs_ratio) /
                          (-I * (p.detuning + w) + kappa / 2.0);
        CHECK(std::abs(st.delta_a - want) < 1e-13 * std::abs(want));
        CHECK(std::abs(st.delta_q) == 0.0);
    }
}

TEST_CASE("coupled mechanical response matches the eliminated-cavity form") {
    const SystemParams p = sideband_point();
    for (double w : {0.97 * p.omega_m, p.omega_m, 1.002 * p.omega_m}) {
        const InternalState st = solve_internal(p, w, unit_input(Channel::f_th));
        const cplx want = 1.0 / effective_mech_denominator(p, w);
        CHECK(std::abs(st.delta_q - want) < 1e-10 * std::abs(want));
    }
}

TEST_CASE("on-resonance drive response is suppressed by the cooling rate") {
    const SystemParams p = sideband_point();
    const DerivedRates d = derive(p);

    SystemParams bare = p;
    bare.g0 = 0.0;
    const double with_cavity =
        std::abs(solve_internal(p, p.omega_m, unit_input(Channel::f_th)).delta_q);
    const double without =
        std::abs(solve_internal(bare, p.omega_m, unit_input(Channel::f_th)).delta_q);

    // Two-photon resonance in the resolved sideband limit: the linewidth
    // grows from gamma_m to gamma_m + omega_c^2/kappa.
    const double suppression = with_cavity / without;
    const double want = p.gamma_m / (p.gamma_m + d.gamma_cool);
    CHECK(rel_err(suppression, want) < 0.02);
}

TEST_CASE("transfer rows obey the reality condition under frequency reversal") {
    SystemParams p = sideband_point();
    SUBCASE("plain") {}
    SUBCASE("with photothermal couplings") {
        p.g_pte = -kTwoPi * 122.0;
        p.g_ptr = kTwoPi * 35.0;
    }
    SUBCASE("rotated local oscillator") { p.phi_lo = 0.73; }

    for (double w : {0.4 * p.omega_m, p.omega_m, 1.3 * p.omega_m}) {
        const ResponseMatrix plus = transfer_matrix(p, w);
        const ResponseMatrix minus = transfer_matrix(p, -w);
        double scale = 0.0;
        for (int j = 0; j < kNumChannels; ++j)
            scale = std::max(scale, std::abs(plus.m(0, j)));
        for (int j = 0; j < kNumChannels; ++j) {
            const int jc = conjugate_partner(j);
            // A Hermitian observable: the response to the conjugate channel
            // at -omega is the conjugate response.
            CHECK(std::abs(minus.m(0, jc) - std::conj(plus.m(0, j))) < 1e-12 * scale);
            CHECK(std::abs(minus.m(1, jc) - std::conj(plus.m(1, j))) <
                  1e-12 * std::max(std::abs(plus.m(1, j)), 1e-6 * scale));
        }
    }
}

TEST_CASE("detection loss never reaches the oscillator") {
    const SystemParams p = sideband_point();
    for (double w : {0.5 * p.omega_m, p.omega_m}) {
        const ResponseMatrix r = transfer_matrix(p, w);
        CHECK(std::abs(r.m(1, int(Channel::s_cryo))) == 0.0);
        CHECK(std::abs(r.m(1, int(Channel::s_cryo_dag))) == 0.0);
    }
}

TEST_CASE("an undercoupled cavity hides the intracavity channels") {
    SystemParams p = sideband_point();
    p.kappa_ex = 0.0;
    p.kappa_0 = kTwoPi * 6.04e6;
    const ResponseMatrix r = transfer_matrix(p, p.omega_m);
    CHECK(std::abs(r.m(0, int(Channel::s_cav))) == 0.0);
    CHECK(std::abs(r.m(0, int(Channel::s_cav_dag))) == 0.0);
    CHECK(std::abs(r.m(0, int(Channel::f_th))) == 0.0);
    CHECK(std::abs(r.m(0, int(Channel::omega_tr))) == 0.0);
    // The splitter feed-through to the detector survives.
    CHECK(std::abs(r.m(0, int(Channel::s_las))) > 0.0);
}

TEST_CASE("without a drive field the optical and mechanical sectors decouple") {
    SystemParams p = sideband_point();
    p.abar0 = 0.0;
    const ResponseMatrix r = transfer_matrix(p, p.omega_m);
    CHECK(std::abs(r.m(0, int(Channel::f_th))) == 0.0);
    CHECK(std::abs(r.m(1, int(Channel::s_las))) == 0.0);
    CHECK(std::abs(r.m(1, int(Channel::s_cav))) == 0.0);
    CHECK(std::abs(r.m(1, int(Channel::f_th))) > 0.0);
}

TEST_CASE("without optomechanical or photothermal coupling only the force moves q") {
    SystemParams p = sideband_point();
    p.g0 = 0.0;
    p.g_pte = 0.0;
    const ResponseMatrix r = transfer_matrix(p, 0.95 * p.omega_m);
    for (int j = 0; j < kNumChannels; ++j) {
        if (Channel(j) == Channel::f_th)
            CHECK(std::abs(r.m(1, j)) > 0.0);
        else
            CHECK(std::abs(r.m(1, j)) == 0.0);
    }
}

TEST_CASE("internal solve is linear in the inputs") {
    const SystemParams p = sideband_point();
    const double w = 1.05 * p.omega_m;
    InputVector a{};
    a[int(Channel::s_las)] = cplx(0.3, -0.4);
    InputVector b{};
    b[int(Channel::f_th)] = cplx(1.5, 0.0);
    InputVector sum{};
    for (int j = 0; j < kNumChannels; ++j)
        sum[j] = 2.0 * a[j] + b[j];
    const InternalState sa = solve_internal(p, w, a);
    const InternalState sb = solve_internal(p, w, b);
    const InternalState ss = solve_internal(p, w, sum);
    CHECK(std::abs(ss.delta_q - (2.0 * sa.delta_q + sb.delta_q)) <
          1e-12 * std::abs(ss.delta_q));
    CHECK(std::abs(ss.delta_a - (2.0 * sa.delta_a + sb.delta_a)) <
          1e-12 * std::abs(ss.delta_a));
}

TEST_CASE("zero frequency is outside the photothermal model domain") {
    SystemParams p = sideband_point();
    p.g_pte = kTwoPi * 122.0;
    CHECK_THROWS_AS(solve_internal(p, 0.0, unit_input(Channel::s_las)), ValidationError);
    p.g_pte = 0.0;
    p.g_ptr = kTwoPi * 10.0;
    CHECK_THROWS_AS(transfer_matrix(p, 0.0), ValidationError);
    p.g_ptr = 0.0;
    CHECK_NOTHROW(solve_internal(p, 0.0, unit_input(Channel::s_las)));
}

TEST_CASE("uncoupled normal modes sit on the bare cavity and oscillator lines") {
    SystemParams p = sideband_point();
    p.abar0 = 0.0;
    p.detuning = -1.3 * p.omega_m; // keep the two branches distinct
    const NormalModes nm = normal_mode_frequencies(p);
    // Red detuned, so the cavity branch lies below the mechanical one.
    CHECK(rel_err(nm.lower.imag(), p.detuning) < 1e-12);
    CHECK(rel_err(-nm.lower.real(), (p.kappa_0 + p.kappa_ex) / 2.0) < 1e-12);
    CHECK(rel_err(nm.upper.imag(), -p.omega_m) < 1e-12);
    CHECK(rel_err(-nm.upper.real(), p.gamma_m / 2.0) < 1e-12);
}

TEST_CASE("strong-coupling splitting follows the closed form") {
    SystemParams p = sideband_point();
    // Tune the drive for an 11.4 MHz exchange rate against a 7.1 MHz line.
    p.kappa_ex = kTwoPi * 3.55e6;
    p.kappa_0 = kTwoPi * 3.55e6;
    const double kappa = p.kappa_0 + p.kappa_ex;
    const double omega_c = kTwoPi * 11.4e6;
    const double abar_mag = omega_c / (2.0 * p.g0);
    p.abar0 = abar_mag * std::hypot(p.detuning, kappa / 2.0) / (kappa / 2.0);

    const DerivedRates d = derive(p);
    CHECK(rel_err(d.omega_c, omega_c) < 1e-12);

    const NormalModes nm = normal_mode_frequencies(p);
    const double want = std::sqrt(omega_c * omega_c -
                                  (kappa - p.gamma_m) * (kappa - p.gamma_m) / 4.0);
    CHECK(rel_err(nm.splitting(), want) < 1e-9);
    CHECK(nm.splitting() / kTwoPi == doctest::Approx(10.83e6).epsilon(0.01));

    // Hybridized modes share one amplitude decay rate; the energy rate is
    // twice that.
    CHECK(rel_err(-2.0 * nm.lower.real(), (kappa + p.gamma_m) / 2.0) < 1e-9);
    CHECK(rel_err(-2.0 * nm.upper.real(), (kappa + p.gamma_m) / 2.0) < 1e-9);
}

TEST_CASE("far into strong coupling the splitting approaches the exchange rate") {
    SystemParams p = sideband_point();
    const double kappa = p.kappa_0 + p.kappa_ex;
    const double omega_c = 40.0 * kappa;
    p.abar0 = (omega_c / (2.0 * p.g0)) * std::hypot(p.detuning, kappa / 2.0) / (kappa / 2.0);
    const NormalModes nm = normal_mode_frequencies(p);
    CHECK(rel_err(nm.splitting(), omega_c) < 1e-3);
}
