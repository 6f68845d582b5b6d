#include "fatou/extended_real.hpp"

#include <charconv>

namespace fatou {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string ExtendedReal::to_string() const { return format_double(v_); }

}  // namespace fatou
