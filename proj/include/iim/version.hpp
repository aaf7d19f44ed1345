#pragma once

namespace iim {

inline constexpr const char* version = "1.0.0";
inline constexpr const char* report_schema = "iim-report/1";

}  // namespace iim
