#pragma once

namespace finmb {

inline constexpr const char* kVersion = "0.1.0";

} // namespace finmb
