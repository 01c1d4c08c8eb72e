#pragma once

namespace stokesdn {
inline constexpr const char* version = "0.1.0";
}
