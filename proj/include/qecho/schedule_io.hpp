#pragma once
// Tabulated schedules: one typed header line, a `t,g` column header, then rows.
//
//   # schedule kind=kzm n=50 j=0.5 gamma=2 g_lo=0 g_hi=10 duration=...
//   t,g
//   0,0
//   ...
#include "qecho/schedule.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qecho {

struct ScheduleTableHeader {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> params; // written in order
};

// sample_count uniform times over [0, T] merged with the segment breakpoints.
std::vector<double> schedule_sample_times(const Schedule& s, int sample_count);

void write_schedule_table(std::ostream& os, const Schedule& s, const ScheduleTableHeader& header, int sample_count);

struct ScheduleTable {
    ScheduleTableHeader header;
    std::vector<std::pair<double, double>> samples;
};

// Accepts files without the typed line; blank lines and other '#' lines are
// skipped. Throws invalid-argument on malformed content.
ScheduleTable read_schedule_table(std::istream& is);

// Piecewise-linear schedule through the table samples.
Schedule load_schedule(std::istream& is);

} // namespace qecho
