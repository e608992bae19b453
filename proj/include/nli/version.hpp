#pragma once

namespace nli {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nli
