#pragma once

namespace sumtrans {

inline constexpr const char* version = "0.1.0";

}  // namespace sumtrans
