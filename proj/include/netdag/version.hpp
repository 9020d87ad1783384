#pragma once

namespace netdag {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace netdag
