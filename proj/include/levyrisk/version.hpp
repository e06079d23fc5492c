#pragma once

namespace levyrisk {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace levyrisk
