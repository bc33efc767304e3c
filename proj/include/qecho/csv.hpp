#pragma once
// Plain CSV helpers with fixed formatting: 17 significant digits, '.' as
// decimal separator, '\n' line endings.
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qecho {

std::string format_real(double x);

void write_row(std::ostream& os, std::span<const double> values);
void write_header(std::ostream& os, std::span<const std::string> names);

// Splits on ',' without quoting support; fields are trimmed of spaces and '\r'.
std::vector<std::string> split_fields(std::string_view line);

// Strict parse of a full field; throws invalid-argument on trailing junk.
double parse_real(std::string_view field);

} // namespace qecho
