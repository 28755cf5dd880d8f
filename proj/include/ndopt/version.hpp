#pragma once

namespace ndopt {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ndopt
