#pragma once

namespace gridimage {

inline constexpr const char* kVersion = "0.1.0";

} // namespace gridimage
