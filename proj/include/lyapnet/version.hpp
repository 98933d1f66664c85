#pragma once

namespace lyapnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lyapnet
