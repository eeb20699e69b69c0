#include "lcoal/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace lcoal {

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_table6(double v) {
  char buf[64];
  // glibc's decimal conversion is correctly rounded (ties-to-even on the
  // binary value), which is the rounding the tables use.
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  // Values that are exactly a short decimal print short (1, 0.5, 0.1875);
  // genuinely rounded values keep all six places (0.101080). The 1e-12 slack
  // absorbs accumulation noise in values that are exact in substance.
  const double rounded = std::strtod(s.c_str(), nullptr);
  if (std::fabs(v - rounded) <= 1e-12) {
    if (s.find('.') != std::string::npos) {
      while (!s.empty() && s.back() == '0') s.pop_back();
      if (!s.empty() && s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
  }
  return s;
}

}  // namespace lcoal
