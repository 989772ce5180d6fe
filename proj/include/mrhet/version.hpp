#pragma once

namespace mrhet {
inline constexpr const char* kVersion = "0.1.0";
}
