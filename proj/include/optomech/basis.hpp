#pragma once

#include <array>
#include <complex>

namespace optomech {

// Fluctuation input channels, in the fixed order used by transfer matrices
// and input covariances everywhere in the library.
//
//   0 ds_las       laser amplitude fluctuation entering the signal splitter
//   1 ds_las_dag   its conjugate partner
//   2 ds_bs        open splitter port (vacuum)
//   3 ds_bs_dag
//   4 ds_cav       intrinsic cavity loss channel (vacuum)
//   5 ds_cav_dag
//   6 ds_cryo      detection loss channel after the cavity (vacuum)
//   7 ds_cryo_dag
//   8 domega_tr    cavity frequency noise (thermorefractive), self-adjoint
//   9 df_th        thermal Langevin force on the oscillator, self-adjoint
enum class Channel : int {
    s_las = 0,
    s_las_dag,
    s_bs,
    s_bs_dag,
    s_cav,
    s_cav_dag,
    s_cryo,
    s_cryo_dag,
    omega_tr,
    f_th,
};

inline constexpr int kNumChannels = 10;

// Index of the channel that is the Hermitian conjugate of channel j at -omega.
// Field channels swap within their pair; the two self-adjoint channels map to
// themselves.
constexpr int conjugate_partner(int j) {
    return j < 8 ? (j ^ 1) : j;
}

constexpr const char* channel_name(int j) {
    constexpr const char* names[kNumChannels] = {
        "ds_las",  "ds_las_dag",  "ds_bs",   "ds_bs_dag", "ds_cav",
        "ds_cav_dag", "ds_cryo", "ds_cryo_dag", "domega_tr", "df_th",
    };
    return names[j];
}

using InputVector = std::array<std::complex<double>, kNumChannels>;

} // namespace optomech
