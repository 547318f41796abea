#pragma once

namespace optomech {

inline constexpr const char* kVersion = "0.1.0";

} // namespace optomech
