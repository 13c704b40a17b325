#pragma once

namespace nehari {

inline constexpr const char* kVersion = "0.1.0";

} // namespace nehari
