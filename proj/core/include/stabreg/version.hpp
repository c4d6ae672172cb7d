#pragma once

namespace stabreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stabreg
