#pragma once

namespace rfmatch {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rfmatch
