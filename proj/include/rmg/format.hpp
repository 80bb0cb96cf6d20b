#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rmg/common.hpp"

namespace rmg {

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
// "re+imi" using `format_double` for both parts, e.g. "1+0.5i", "-2-1e-05i".
std::string format_complex(cplx z);

// Parses a real number; throws ConfigError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what = "number");
// Parses "3", "-0.5i", "1+0.5i", "2-i", "1e-3+2e-2i".
cplx parse_complex(std::string_view text, std::string_view what = "complex number");

std::string_view trim(std::string_view s);
// Splits on `sep`, trimming each piece; empty input gives an empty list.
std::vector<std::string> split_list(std::string_view s, char sep = ',');

}  // namespace rmg
