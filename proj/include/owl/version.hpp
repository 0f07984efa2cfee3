#pragma once

namespace owl {

inline constexpr const char* kVersion = "0.1.0";

} // namespace owl
