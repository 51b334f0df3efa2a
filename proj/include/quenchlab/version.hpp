#pragma once

namespace quenchlab {

inline constexpr const char* version = "0.1.0";

}
