#pragma once

namespace omchain {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace omchain
