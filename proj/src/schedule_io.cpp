#include "qecho/schedule_io.hpp"

#include "qecho/csv.hpp"
#include "qecho/error.hpp"

#include <algorithm>
#include <sstream>

namespace qecho {

std::vector<double> schedule_sample_times(const Schedule& s, int sample_count) {
    if (sample_count < 2) fail(ErrorCode::invalid_argument, "sample count must be at least 2");
    const double total = s.total_duration();
    std::vector<double> times = s.breakpoints();
    for (int i = 0; i < sample_count; ++i) times.push_back(total * i / (sample_count - 1));
    std::sort(times.begin(), times.end());
    // Drop near-duplicates so consecutive rows never share a time stamp.
    std::vector<double> out;
    const double eps = 1e-12 * std::max(1.0, total);
    for (double t : times)
        if (out.empty() || t - out.back() > eps) out.push_back(t);
    out.back() = total;
    return out;
}

void write_schedule_table(std::ostream& os, const Schedule& s, const ScheduleTableHeader& header, int sample_count) {
    os << "# schedule kind=" << header.kind;
    for (const auto& [key, value] : header.params) os << ' ' << key << '=' << value;
    os << '\n' << "t,g\n";
    for (double t : schedule_sample_times(s, sample_count)) {
        const double row[2] = {t, s.value(t)};
        write_row(os, row);
    }
}

static ScheduleTableHeader parse_typed_line(const std::string& line) {
    ScheduleTableHeader h;
    std::istringstream in(line.substr(1));
    std::string word;
    in >> word; // "schedule"
    while (in >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorCode::invalid_argument, "malformed schedule header token '" + word + "'");
        std::string key = word.substr(0, eq), value = word.substr(eq + 1);
        if (key == "kind")
            h.kind = value;
        else
            h.params.emplace_back(std::move(key), std::move(value));
    }
    return h;
}

ScheduleTable read_schedule_table(std::istream& is) {
    ScheduleTable table;
    std::string line;
    bool have_columns = false;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') {
            if (line.rfind("# schedule", 0) == 0) table.header = parse_typed_line(line);
            continue;
        }
        const auto fields = split_fields(line);
        if (!have_columns) {
            if (fields.size() != 2 || fields[0] != "t" || fields[1] != "g")
                fail(ErrorCode::invalid_argument, "schedule table must start with a 't,g' header");
            have_columns = true;
            continue;
        }
        if (fields.size() != 2)
            fail(ErrorCode::invalid_argument, "schedule table line " + std::to_string(lineno) + ": expected 2 fields");
        table.samples.emplace_back(parse_real(fields[0]), parse_real(fields[1]));
    }
    if (!have_columns) fail(ErrorCode::invalid_argument, "schedule table has no 't,g' header");
    if (table.samples.size() < 2) fail(ErrorCode::empty_schedule, "schedule table needs at least two rows");
    return table;
}

Schedule load_schedule(std::istream& is) { return piecewise_linear(read_schedule_table(is).samples); }

} // namespace qecho
