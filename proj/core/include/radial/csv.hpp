#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace radial {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Splits a line on `delimiter`, trimming surrounding whitespace of each field.
std::vector<std::string> split_fields(std::string_view line, char delimiter = ',');

/// Parses a whole field as a double; returns false on trailing garbage.
bool parse_double(std::string_view text, double& out);

} // namespace radial
