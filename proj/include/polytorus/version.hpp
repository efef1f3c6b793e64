#pragma once

namespace polytorus {
inline constexpr const char* kVersion = "0.1.0";
}
