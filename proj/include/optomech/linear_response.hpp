#pragma once

#include <complex>

#include <Eigen/Dense>

#include "optomech/basis.hpp"
#include "optomech/params.hpp"

namespace optomech {

// Intracavity field and oscillator response at one Fourier frequency.
struct InternalState {
    std::complex<double> delta_a;
    std::complex<double> delta_a_dag; // Fourier component of the conjugate field at +omega
    std::complex<double> delta_q;
};

// Rows: homodyne fluctuation dh, oscillator quadrature dq.
// Columns follow the Channel order in basis.hpp.
struct ResponseMatrix {
    double omega = 0.0; // rad/s, evaluation frequency
    Eigen::Matrix<std::complex<double>, 2, kNumChannels> m;
};

// Solves the linearized intracavity equations at fixed omega for the given
// input amplitudes. The delta_a_dag equation is the Hermitian conjugate of
// the delta_a equation evaluated at -omega, so delta_a_dag(omega) pairs with
// delta_a(-omega); the photothermal 1/omega terms change sign under that
// conjugation. omega = 0 is outside the model domain whenever g_pte or g_ptr
// is nonzero.
InternalState solve_internal(const SystemParams& p, double omega, const InputVector& in);

// Linear map from the ten input channels to (dh, dq) at fixed omega,
// including the full beamsplitter and detection chain. The dq row is zero in
// the detection-loss columns by construction.
ResponseMatrix transfer_matrix(const SystemParams& p, double omega);

// Complex eigenvalues of the coupled cavity/oscillator mode pair in the
// rotating frame. Frequencies are -imag(lambda), amplitude decay rates
// -real(lambda). Sorted by ascending imaginary part, so for a red-detuned
// drive `lower` is the mode near the (negative) cavity branch.
struct NormalModes {
    std::complex<double> lower;
    std::complex<double> upper;
    // Beat frequency between the two mode branches, rad/s.
    double splitting() const { return std::abs(lower.imag() - upper.imag()); }
};

NormalModes normal_mode_frequencies(const SystemParams& p);

} // namespace optomech
