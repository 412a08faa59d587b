#pragma once

namespace hybridsizer {

inline constexpr const char* kEngineName = "hybridsizer";
inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace hybridsizer
