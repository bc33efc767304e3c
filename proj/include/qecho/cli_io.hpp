#pragma once
// Run configuration, key=value config files, and the command drivers behind
// the `qecho` tool. Every command writes its table to `out` and a JSON sidecar
// to `out + ".meta"`.
#include "qecho/adiabaticity.hpp"
#include "qecho/analytic.hpp"
#include "qecho/error.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qecho {

inline constexpr const char* tool_version = "1.0.0";

enum class ScheduleKind { linear, kzm, rc, file };
const char* to_string(ScheduleKind k);

struct RunConfig {
    int n_sites = 50;
    double coupling_j = 1.0;
    double g0 = 10.0;
    double gt = 0.0;
    double tau_q = 1.0;
    double delay = 0.0;
    ScheduleKind schedule_kind = ScheduleKind::linear;
    double gamma = 2.0;
    double gamma_prime = 0.0; // 0: use 2 gamma / pi
    double threshold = 0.0;   // 0: command default (0.999 echo, 0.9 search)
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.0;
    int sample_count = 201;
    std::string output_path;
    double tau_min = 1e-3;
    double tau_max = 1e3;
    int tau_points = 61;
    bool tau_log = true;
    int segments = 1;
    std::string schedule_file;
    bool echo = true;
    double start_fraction = 0.0; // > 0: shared-clock KZM/RC window, see uniform_pair
    int window = 5;
    double tau_floor = 1.0;
    double tau_ceiling = 1e4;
    ModeRange range = ModeRange::up_to_half_pi;
    PhaseConvention phase = PhaseConvention::stokes;
    int threads = 0; // 0: OpenMP default

    Chain chain() const { return {n_sites, coupling_j, 1.0}; }
    IntegratorConfig integrator() const;
    SearchOptions search() const;
    double resolved_gamma_prime() const;
    std::vector<double> tau_grid() const;
};

// Keys accepted in config files; each is also a `--key` flag of the tool.
const std::vector<std::string>& config_keys();

// Throws config-error for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// key=value per line; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& is);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// Defaults, then file settings, then flag settings (flags win).
RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_settings,
                         const std::vector<std::pair<std::string, std::string>>& flag_settings);

// Resolved config as a JSON object, with the command and tool version.
std::string meta_json(const RunConfig& cfg, const std::string& command);

// Forward schedule selected by schedule_kind (and start_fraction for kzm/rc).
Schedule forward_schedule(const RunConfig& cfg);

// Table writers.
void write_trace_csv(std::ostream& os, const TrajectoryTrace& trace);
void write_sweep_csv(std::ostream& os, const SweepTable& table);

struct CompareRow {
    double tau_q = 0.0;
    double f_numeric = 1.0;
    double f_analytic = 1.0;
    bool valid = true; // asymptotics applicable: 4 tau_q (cos(pi/N) - g_T)^2 >= 10
};
std::vector<CompareRow> compare_analytic(const RunConfig& cfg);
void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

// Command drivers. Text reports go to `report`; tables go to cfg.output_path
// (or the command's default file name) plus the .meta sidecar.
int cmd_simulate(const RunConfig& cfg, std::ostream& report);
int cmd_sweep(const RunConfig& cfg, std::ostream& report);
int cmd_schedule_gen(const RunConfig& cfg, std::ostream& report);
int cmd_compare_analytic(const RunConfig& cfg, std::ostream& report);
int cmd_min_tau(const RunConfig& cfg, std::ostream& report);
int cmd_echo_test(const RunConfig& cfg, std::ostream& report);
// Finite-N and infinite-chain gap on `samples` points between g0 and gt.
int cmd_gap(const RunConfig& cfg, std::ostream& report);

// Dispatch by command name; throws config-error for an unknown command.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& report);

// 0 success, 2 configuration error, 3 numeric failure.
int exit_code_for(const Error& e);

} // namespace qecho
