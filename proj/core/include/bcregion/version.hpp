#pragma once

#include <string_view>

namespace bcregion {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace bcregion
