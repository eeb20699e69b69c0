#pragma once

#include <string>

namespace lcoal {

// Shortest exact round-trip decimal for CSV/JSON payloads.
std::string format_full(double v);

// Value rounded (half-even) to 6 decimals, printed the way the reference
// covariance tables print: exactly-representable values short (2 -> "2",
// 0.02 -> "0.02"), rounded values with all six places (-3.507e-6 ->
// "-0.000004", 0.10108024 -> "0.101080"). A value that is zero up to
// accumulation noise prints "0".
std::string format_table6(double v);

}  // namespace lcoal
