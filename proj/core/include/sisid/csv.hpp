#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace sisid::csv {

// Shortest round-trip representation; "inf", "-inf" and "nan" for
// non-finite values.
std::string format(double value);

// Empty cell for a missing value.
std::string format(const std::optional<double>& value);

// First line of every CSV the library writes: "# schema: <id>".
void write_schema_line(std::ostream& os, std::string_view schema_id);

}  // namespace sisid::csv
