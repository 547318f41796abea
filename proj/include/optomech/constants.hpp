#pragma once

namespace optomech {

// SI defining constants (exact since the 2019 redefinition).
struct PhysicalConstants {
    double hbar;           // J s
    double k_boltzmann;    // J / K
    double speed_of_light; // m / s
};

constexpr PhysicalConstants codata() {
    return PhysicalConstants{
        1.054571817e-34, // h / 2 pi, rounded from the exact h = 6.62607015e-34 J s
        1.380649e-23,
        299792458.0,
    };
}

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

} // namespace optomech
