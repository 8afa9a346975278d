#pragma once

namespace tomotv {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tomotv
