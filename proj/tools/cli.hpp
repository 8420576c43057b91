#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carnot_hardy::cli {

inline constexpr int exit_pass = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_math_failure = 2;
inline constexpr int exit_quadrature_cap = 3;

std::string report_schema_version();

// fixed CSV header, one row per result
std::string csv_header();

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// report text with the generated_at line removed
std::string strip_timestamp(const std::string& report);

}  // namespace carnot_hardy::cli
