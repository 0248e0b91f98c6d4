#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace diabml {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_real(double value);

/// Strict parse of a full string as a finite or infinite double.
double parse_real_strict(std::string_view text);

/// Space-separated reals, each via format_real.
std::string format_reals(const std::vector<double>& values);
std::vector<double> parse_reals(std::string_view text);

}  // namespace diabml
