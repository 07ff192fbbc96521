#pragma once

#include <string>

namespace cusp::io {

// Doubles are persisted with 17 significant digits, which round-trips
// bit-exactly through decimal.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace cusp::io
