#pragma once

#include <complex>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace conedet::tools {

using Json = nlohmann::ordered_json;

enum class Format { kJson, kCsv, kText };

Format parse_format(const std::string& name);

/// Value rounded to 15 significant digits; keeps reports byte-stable.
double round15(double x);

Json complex_json(std::complex<double> z);

/// Recursively rounds every floating-point leaf to 15 significant digits.
Json rounded(const Json& j);

/// Writes {command, inputs, outputs, residuals, pass}. CSV and text flatten
/// nested keys with dots and array indices in brackets.
void write_report(std::ostream& out, const Json& report, Format format);

}  // namespace conedet::tools
