#pragma once

#include <complex>

#include <Eigen/Dense>

#include "optomech/params.hpp"
#include "optomech/spectra.hpp"

namespace optomech::testutil {

// Steady-state occupancy from the time-domain quadrature picture, never
// touching the frequency-domain solver. State X = (x, y, q, p) with
// x = da + da^dag, y = -i (da - da^dag), q' = omega_m p:
//   x' = -(kappa/2) x - Delta y + 2 g0 Im(abar) q + sqrt(kappa) xi_x
//   y' =  Delta x - (kappa/2) y - 2 g0 Re(abar) q + sqrt(kappa) xi_y
//   q' =  omega_m p
//   p' = -omega_m q - gamma_m p - 2 g0 (Re(abar) x + Im(abar) y) + f
// Vacuum quadrature noise has unit flat PSD, the force S_ff. The stationary
// covariance V solves A V + V A^T + D = 0, solved here by vectorizing to a
// 16x16 linear system. nbar = (V_qq + V_pp)/4 - 1/2.
inline Eigen::Matrix4d quadrature_drift(const SystemParams& p) {
    const double kappa = p.kappa_0 + p.kappa_ex;
    const std::complex<double> abar =
        p.abar0 * (kappa / 2.0) / std::complex<double>(kappa / 2.0, -p.detuning);
    const double ar = abar.real(), ai = abar.imag();
    Eigen::Matrix4d a;
    a << -kappa / 2.0, -p.detuning, 2.0 * p.g0 * ai, 0.0,
        p.detuning, -kappa / 2.0, -2.0 * p.g0 * ar, 0.0,
        0.0, 0.0, 0.0, p.omega_m,
        -2.0 * p.g0 * ar, -2.0 * p.g0 * ai, -p.omega_m, -p.gamma_m;
    return a;
}

inline double lyapunov_occupancy(const SystemParams& p,
                                 ForceNoise fn = ForceNoise::classical) {
    const double kappa = p.kappa_0 + p.kappa_ex;
    const double occ = fn == ForceNoise::quantum ? p.nbar_bath + 0.5 : p.nbar_bath;
    const double sff = 4.0 * occ * p.gamma_m;

    const Eigen::Matrix4d a = quadrature_drift(p);
    Eigen::Vector4d dd(kappa, kappa, 0.0, sff);

    Eigen::Matrix<double, 16, 16> k = Eigen::Matrix<double, 16, 16>::Zero();
    Eigen::Matrix<double, 16, 1> rhs = Eigen::Matrix<double, 16, 1>::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const int row = 4 * i + j;
            for (int m = 0; m < 4; ++m) {
                k(row, 4 * m + j) += a(i, m); // (A V)_ij
                k(row, 4 * i + m) += a(j, m); // (V A^T)_ij
            }
            if (i == j)
                rhs(row) = -dd(i);
        }
    }
    const Eigen::Matrix<double, 16, 1> v = k.fullPivLu().solve(rhs);
    const double vqq = v(4 * 2 + 2);
    const double vpp = v(4 * 3 + 3);
    return (vqq + vpp) / 4.0 - 0.5;
}

} // namespace optomech::testutil
