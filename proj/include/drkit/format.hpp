#pragma once

#include <string>
#include <string_view>

namespace drkit {

/// Shortest round-trip decimal form; "NA" for NaN.
std::string format_number(double v);

/// Fixed-point with `digits` decimals, independent of locale.
std::string format_fixed(double v, int digits);

/// Quote a CSV field when it contains a comma, quote, or line break.
std::string csv_escape(std::string_view field);

}  // namespace drkit
