#include "sisid/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace sisid::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format(const std::optional<double>& value) {
  return value ? format(*value) : std::string{};
}

void write_schema_line(std::ostream& os, std::string_view schema_id) {
  os << "# schema: " << schema_id << '\n';
}

}  // namespace sisid::csv
