#include "qecho/csv.hpp"

#include "qecho/error.hpp"

#include <charconv>
#include <cstdio>

namespace qecho {

std::string format_real(double x) {
    // snprintf always uses the "C" locale conventions for %g as long as the
    // program never calls setlocale, which the tools do not.
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, n > 0 ? static_cast<std::size_t>(n) : 0);
}

void write_row(std::ostream& os, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        os << format_real(values[i]);
    }
    os << '\n';
}

void write_header(std::ostream& os, std::span<const std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os << ',';
        os << names[i];
    }
    os << '\n';
}

static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.emplace_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double parse_real(std::string_view field) {
    field = trim(field);
    double x = 0.0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, x);
    if (ec != std::errc() || ptr != end)
        fail(ErrorCode::invalid_argument, "not a number: '" + std::string(field) + "'");
    return x;
}

} // namespace qecho
