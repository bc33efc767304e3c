#include "qecho/cli_io.hpp"

#include "qecho/csv.hpp"
#include "qecho/schedule_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <omp.h>
#include <sstream>

namespace qecho {

const char* to_string(ScheduleKind k) {
    switch (k) {
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::kzm: return "kzm";
    case ScheduleKind::rc: return "rc";
    case ScheduleKind::file: return "file";
    }
    return "linear";
}

IntegratorConfig RunConfig::integrator() const {
    IntegratorConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.max_step = max_step;
    c.sample_count = sample_count;
    return c;
}

SearchOptions RunConfig::search() const {
    SearchOptions o;
    o.floor = tau_floor;
    o.ceiling = tau_ceiling;
    o.window = window;
    return o;
}

double RunConfig::resolved_gamma_prime() const {
    return gamma_prime > 0.0 ? gamma_prime : 2.0 * gamma / std::numbers::pi;
}

std::vector<double> RunConfig::tau_grid() const {
    if (!(tau_min > 0.0) || tau_max < tau_min || tau_points < 1)
        fail(ErrorCode::config_error, "tau grid needs 0 < tau-min <= tau-max and tau-points >= 1");
    return tau_log ? geometric_grid(tau_min, tau_max, tau_points) : uniform_grid(tau_min, tau_max, tau_points);
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    fail(ErrorCode::config_error, "bad value '" + value + "' for " + key + ": " + why);
}

double to_real(const std::string& key, const std::string& v) {
    try {
        const double x = parse_real(v);
        if (!std::isfinite(x)) bad_value(key, v, "not finite");
        return x;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::config_error) throw;
        bad_value(key, v, "expected a number");
    }
}

int to_int(const std::string& key, const std::string& v) {
    int x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "expected an integer");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v, "expected true or false");
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<json(const RunConfig&)> get;
};

template <class T, class Parse>
Field member_field(std::string key, T RunConfig::*m, Parse parse) {
    return {[key, m, parse](RunConfig& c, const std::string& v) { c.*m = parse(key, v); },
            [m](const RunConfig& c) { return json(c.*m); }};
}

Field real_field(std::string key, double RunConfig::*m) { return member_field(std::move(key), m, to_real); }
Field int_field(std::string key, int RunConfig::*m) { return member_field(std::move(key), m, to_int); }
Field bool_field(std::string key, bool RunConfig::*m) { return member_field(std::move(key), m, to_bool); }
Field text_field(std::string key, std::string RunConfig::*m) {
    return member_field(std::move(key), m, [](const std::string&, const std::string& v) { return v; });
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = {
        {"n", int_field("n", &RunConfig::n_sites)},
        {"j", real_field("j", &RunConfig::coupling_j)},
        {"g0", real_field("g0", &RunConfig::g0)},
        {"gt", real_field("gt", &RunConfig::gt)},
        {"tau-q", real_field("tau-q", &RunConfig::tau_q)},
        {"delay", real_field("delay", &RunConfig::delay)},
        {"schedule", Field{[](RunConfig& c, const std::string& v) {
                               if (v == "linear") c.schedule_kind = ScheduleKind::linear;
                               else if (v == "kzm") c.schedule_kind = ScheduleKind::kzm;
                               else if (v == "rc") c.schedule_kind = ScheduleKind::rc;
                               else if (v == "file") c.schedule_kind = ScheduleKind::file;
                               else bad_value("schedule", v, "expected linear, kzm, rc or file");
                           },
                           [](const RunConfig& c) { return json(to_string(c.schedule_kind)); }}},
        {"gamma", real_field("gamma", &RunConfig::gamma)},
        {"gamma-prime", real_field("gamma-prime", &RunConfig::gamma_prime)},
        {"threshold", real_field("threshold", &RunConfig::threshold)},
        {"segments", int_field("segments", &RunConfig::segments)},
        {"out", text_field("out", &RunConfig::output_path)},
        {"rel-tol", real_field("rel-tol", &RunConfig::rel_tol)},
        {"abs-tol", real_field("abs-tol", &RunConfig::abs_tol)},
        {"max-step", real_field("max-step", &RunConfig::max_step)},
        {"samples", int_field("samples", &RunConfig::sample_count)},
        {"tau-min", real_field("tau-min", &RunConfig::tau_min)},
        {"tau-max", real_field("tau-max", &RunConfig::tau_max)},
        {"tau-points", int_field("tau-points", &RunConfig::tau_points)},
        {"tau-log", bool_field("tau-log", &RunConfig::tau_log)},
        {"schedule-file", text_field("schedule-file", &RunConfig::schedule_file)},
        {"echo", bool_field("echo", &RunConfig::echo)},
        {"start-fraction", real_field("start-fraction", &RunConfig::start_fraction)},
        {"window", int_field("window", &RunConfig::window)},
        {"tau-floor", real_field("tau-floor", &RunConfig::tau_floor)},
        {"tau-ceiling", real_field("tau-ceiling", &RunConfig::tau_ceiling)},
        {"range", Field{[](RunConfig& c, const std::string& v) {
                            if (v == "half") c.range = ModeRange::up_to_half_pi;
                            else if (v == "all") c.range = ModeRange::all_modes;
                            else bad_value("range", v, "expected half or all");
                        },
                        [](const RunConfig& c) { return json(c.range == ModeRange::all_modes ? "all" : "half"); }}},
        {"phase", Field{[](RunConfig& c, const std::string& v) {
                            if (v == "stokes") c.phase = PhaseConvention::stokes;
                            else if (v == "printed") c.phase = PhaseConvention::printed;
                            else bad_value("phase", v, "expected stokes or printed");
                        },
                        [](const RunConfig& c) { return json(c.phase == PhaseConvention::printed ? "printed" : "stokes"); }}},
        {"threads", int_field("threads", &RunConfig::threads)},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_config(const RunConfig& c) {
    try {
        c.chain().validate();
        c.integrator().validate();
    } catch (const Error& e) {
        fail(ErrorCode::config_error, e.what());
    }
    if (!(c.tau_q > 0.0)) fail(ErrorCode::config_error, "tau-q must be > 0");
    if (c.delay < 0.0) fail(ErrorCode::config_error, "delay must be >= 0");
    if (c.schedule_kind == ScheduleKind::file && c.schedule_file.empty())
        fail(ErrorCode::config_error, "schedule=file needs schedule-file");
    if (c.threads < 0) fail(ErrorCode::config_error, "threads must be >= 0");
    if (c.segments < 1) fail(ErrorCode::config_error, "segments must be >= 1");
    if (c.threshold < 0.0 || c.threshold > 1.0) fail(ErrorCode::config_error, "threshold must lie in [0, 1]");
    if (!(c.gamma > 0.0) || c.gamma_prime < 0.0) fail(ErrorCode::config_error, "gamma must be > 0, gamma-prime >= 0");
    if (c.start_fraction < 0.0 || c.start_fraction > 1.0)
        fail(ErrorCode::config_error, "start-fraction must lie in [0, 1]");
}

std::string output_or(const RunConfig& c, const char* fallback) {
    return c.output_path.empty() ? std::string(fallback) : c.output_path;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::io_error, "cannot open '" + path + "' for writing");
    return os;
}

void finish_output(std::ofstream& os, const std::string& path, const RunConfig& c, const std::string& command) {
    os.flush();
    if (!os) fail(ErrorCode::io_error, "write to '" + path + "' failed");
    std::ofstream meta = open_output(path + ".meta");
    meta << meta_json(c, command) << '\n';
    if (!meta) fail(ErrorCode::io_error, "write to '" + path + ".meta' failed");
}

double threshold_or(const RunConfig& c, double fallback) { return c.threshold > 0.0 ? c.threshold : fallback; }

void set_threads(const RunConfig& c) {
    if (c.threads > 0) omp_set_num_threads(c.threads);
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, f] : fields()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) fail(ErrorCode::config_error, "unknown config key '" + key + "'");
    it->second.set(cfg, value);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::config_error, "config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) fail(ErrorCode::config_error, "config line " + std::to_string(lineno) + ": empty key");
        if (!fields().count(key)) fail(ErrorCode::config_error, "unknown config key '" + key + "'");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::config_error, "cannot read config file '" + path + "'");
    return parse_config_text(is);
}

RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_settings,
                         const std::vector<std::pair<std::string, std::string>>& flag_settings) {
    RunConfig cfg;
    for (const auto& [k, v] : file_settings) apply_setting(cfg, k, v);
    for (const auto& [k, v] : flag_settings) apply_setting(cfg, k, v);
    check_config(cfg);
    return cfg;
}

std::string meta_json(const RunConfig& cfg, const std::string& command) {
    json conf = json::object();
    for (const auto& [name, f] : fields()) conf[name] = f.get(cfg);
    json j = {{"tool", "qecho"}, {"version", tool_version}, {"command", command}, {"config", conf}};
    return j.dump(2);
}

Schedule forward_schedule(const RunConfig& cfg) {
    const Chain chain = cfg.chain();
    switch (cfg.schedule_kind) {
    case ScheduleKind::linear: return linear(cfg.g0, cfg.gt, cfg.tau_q);
    case ScheduleKind::kzm:
    case ScheduleKind::rc: {
        if (cfg.start_fraction > 0.0) {
            const UniformPair p = uniform_pair(chain, cfg.gamma, cfg.start_fraction);
            return cfg.schedule_kind == ScheduleKind::kzm ? p.kzm : p.rc;
        }
        const double lo = std::min(cfg.g0, cfg.gt), hi = std::max(cfg.g0, cfg.gt);
        const Schedule up = cfg.schedule_kind == ScheduleKind::kzm
                                ? kzm_schedule(chain, cfg.gamma, lo, hi)
                                : rc_schedule(chain, cfg.resolved_gamma_prime(), lo, hi);
        return cfg.g0 <= cfg.gt ? up : reverse(up);
    }
    case ScheduleKind::file: {
        if (cfg.schedule_file.empty()) fail(ErrorCode::config_error, "schedule=file needs schedule-file");
        std::ifstream is(cfg.schedule_file);
        if (!is) fail(ErrorCode::config_error, "cannot read schedule file '" + cfg.schedule_file + "'");
        return load_schedule(is);
    }
    }
    fail(ErrorCode::config_error, "unknown schedule kind");
}

void write_trace_csv(std::ostream& os, const TrajectoryTrace& trace) {
    std::vector<std::string> names = {"t", "g", "p_gs"};
    const std::size_t modes = trace.samples.empty() ? 0 : trace.samples.front().mode_populations.size();
    for (std::size_t i = 0; i < modes; ++i) names.push_back("pop_k" + std::to_string(i));
    write_header(os, names);
    std::vector<double> row;
    for (const auto& s : trace.samples) {
        row.assign({s.t, s.g, s.p_gs});
        row.insert(row.end(), s.mode_populations.begin(), s.mode_populations.end());
        write_row(os, row);
    }
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    os << "tau_q,fidelity,magnetization,kink_density,residual_energy\n";
    for (const auto& r : table) {
        const double row[5] = {r.tau_q, r.fidelity, r.magnetization, r.kink_density, r.residual_energy};
        write_row(os, row);
    }
}

std::vector<CompareRow> compare_analytic(const RunConfig& cfg) {
    const Chain chain = cfg.chain();
    if (!(std::abs(cfg.gt) < 1.0)) fail(ErrorCode::invalid_turnaround, "compare-analytic needs |gt| < 1");
    const std::vector<double> grid = cfg.tau_grid();
    const SweepTable numeric = sweep_tau(chain, grid, 0.0, cfg.g0, cfg.gt, cfg.integrator());
    const double d = min_gap_location(chain) - cfg.gt;
    std::vector<CompareRow> rows;
    for (const auto& r : numeric) {
        CompareRow c;
        c.tau_q = r.tau_q;
        c.f_numeric = r.fidelity;
        c.f_analytic = fidelity_intermediate(chain, r.tau_q, cfg.gt, cfg.range, cfg.phase).fidelity;
        c.valid = 4.0 * r.tau_q * d * d >= 10.0;
        rows.push_back(c);
    }
    return rows;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
    os << "tau_q,f_numeric,f_analytic,abs_diff,valid\n";
    for (const auto& r : rows) {
        os << format_real(r.tau_q) << ',' << format_real(r.f_numeric) << ',' << format_real(r.f_analytic) << ','
           << format_real(std::abs(r.f_numeric - r.f_analytic)) << ',' << (r.valid ? 1 : 0) << '\n';
    }
}

int cmd_simulate(const RunConfig& cfg, std::ostream& report) {
    set_threads(cfg);
    const Schedule forward = forward_schedule(cfg);
    const Schedule full = cfg.echo ? echo_with_delay(forward, cfg.delay) : forward;
    const TrajectoryTrace trace = evolve_chain(cfg.chain(), full, cfg.integrator());
    const std::string path = output_or(cfg, "trace.csv");
    std::ofstream os = open_output(path);
    write_trace_csv(os, trace);
    finish_output(os, path, cfg, "simulate");
    report << "final p_gs " << format_real(trace.final_p_gs()) << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& report) {
    set_threads(cfg);
    const std::vector<double> grid = cfg.tau_grid();
    const SweepTable table = sweep_tau(cfg.chain(), grid, cfg.delay, cfg.g0, cfg.gt, cfg.integrator());
    const std::string path = output_or(cfg, "sweep.csv");
    std::ofstream os = open_output(path);
    write_sweep_csv(os, table);
    finish_output(os, path, cfg, "sweep");
    report << table.size() << " rows written to " << path << "\n";
    return 0;
}

int cmd_schedule_gen(const RunConfig& cfg, std::ostream& report) {
    if (cfg.schedule_kind != ScheduleKind::kzm && cfg.schedule_kind != ScheduleKind::rc)
        fail(ErrorCode::config_error, "schedule-gen needs schedule=kzm or schedule=rc");
    const Chain chain = cfg.chain();
    const bool kzm = cfg.schedule_kind == ScheduleKind::kzm;
    RunConfig up = cfg;
    if (cfg.start_fraction == 0.0 && cfg.g0 > cfg.gt) std::swap(up.g0, up.gt); // tables run upward in g
    const Schedule s = forward_schedule(up);

    ScheduleTableHeader h;
    h.kind = kzm ? "kzm" : "rc";
    h.params = {{"n", std::to_string(chain.n_sites)}, {"j", format_real(chain.coupling_j)}};
    if (kzm)
        h.params.emplace_back("gamma", format_real(cfg.gamma));
    else
        h.params.emplace_back("gamma_prime", format_real(cfg.resolved_gamma_prime()));
    h.params.emplace_back("g_start", format_real(s.start_value()));
    h.params.emplace_back("g_end", format_real(s.end_value()));
    h.params.emplace_back("duration", format_real(s.total_duration()));
    h.params.emplace_back("unclamped_duration", format_real(kzm ? kzm_unclamped_duration(chain, cfg.gamma)
                                                                : rc_unclamped_duration(chain, cfg.resolved_gamma_prime())));

    const std::string path = output_or(cfg, "schedule.csv");
    std::ofstream os = open_output(path);
    write_schedule_table(os, s, h, cfg.sample_count);
    finish_output(os, path, cfg, "schedule-gen");
    report << h.kind << " duration " << format_real(s.total_duration()) << "\n";
    return 0;
}

int cmd_compare_analytic(const RunConfig& cfg, std::ostream& report) {
    set_threads(cfg);
    const auto rows = compare_analytic(cfg);
    double sum = 0.0;
    int valid = 0;
    for (const auto& r : rows) {
        if (!r.valid) continue;
        sum += (r.f_numeric - r.f_analytic) * (r.f_numeric - r.f_analytic);
        ++valid;
    }
    const std::string path = output_or(cfg, "compare.csv");
    std::ofstream os = open_output(path);
    write_compare_csv(os, rows);
    finish_output(os, path, cfg, "compare-analytic");
    report << "rms abs_diff over " << valid << " valid rows "
           << (valid ? format_real(std::sqrt(sum / valid)) : std::string("n/a")) << "\n";
    return 0;
}

int cmd_min_tau(const RunConfig& cfg, std::ostream& report) {
    set_threads(cfg);
    const Chain chain = cfg.chain();
    const double threshold = threshold_or(cfg, default_search_threshold);
    const SegmentedProtocol seg = segmented_protocol(chain, cfg.g0, cfg.gt, cfg.segments, threshold, cfg.delay,
                                                     cfg.integrator(), cfg.search());
    const std::string path = output_or(cfg, "min_tau.csv");
    std::ofstream os = open_output(path);
    os << "segment,g_start,g_end,tau_c,duration\n";
    for (int i = 0; i < cfg.segments; ++i) {
        os << i << ',' << format_real(seg.edges[i]) << ',' << format_real(seg.edges[i + 1]) << ','
           << format_real(seg.tau_c[i]) << ',' << format_real(std::abs(seg.edges[i + 1] - seg.edges[i]) * seg.tau_c[i])
           << '\n';
    }
    finish_output(os, path, cfg, "min-tau");

    if (cfg.segments == 1) {
        report << "tau_c " << format_real(seg.tau_c[0]) << "\n";
    } else {
        const MinTauResult single =
            min_adiabatic_tau(chain, cfg.g0, cfg.gt, threshold, cfg.delay, cfg.integrator(), cfg.search());
        report << "segmented total duration " << format_real(seg.total_duration) << "\n"
               << "single-rate tau_c " << format_real(single.tau_c) << ", duration "
               << format_real(std::abs(cfg.g0 - cfg.gt) * single.tau_c) << "\n";
    }
    return 0;
}

int cmd_echo_test(const RunConfig& cfg, std::ostream& report) {
    set_threads(cfg);
    const double threshold = threshold_or(cfg, default_echo_threshold);
    const EchoReport rep = echo_test(cfg.chain(), forward_schedule(cfg), cfg.delay, threshold, cfg.integrator());
    const std::string path = output_or(cfg, "echo.csv");
    std::ofstream os = open_output(path);
    os << "fidelity,threshold,verdict,regime_hint,delay,magnetization,kink_density,residual_energy\n";
    os << format_real(rep.fidelity) << ',' << format_real(rep.threshold) << ',' << to_string(rep.verdict) << ','
       << to_string(rep.regime_hint) << ',' << format_real(rep.delay_used) << ','
       << format_real(rep.observables.magnetization) << ',' << format_real(rep.observables.kink_density) << ','
       << format_real(rep.observables.residual_energy) << '\n';
    finish_output(os, path, cfg, "echo-test");
    report << "fidelity " << format_real(rep.fidelity) << " -> " << to_string(rep.verdict) << " (regime hint "
           << to_string(rep.regime_hint) << ")\n";
    return 0;
}

int cmd_gap(const RunConfig& cfg, std::ostream& report) {
    const Chain chain = cfg.chain();
    if (cfg.sample_count < 2) fail(ErrorCode::config_error, "gap needs samples >= 2");
    const std::string path = output_or(cfg, "gap.csv");
    std::ofstream os = open_output(path);
    os << "g,gap,gap_infinite\n";
    for (int i = 0; i < cfg.sample_count; ++i) {
        const double g = cfg.g0 + (cfg.gt - cfg.g0) * i / (cfg.sample_count - 1);
        const std::array<double, 3> row = {g, gap(chain, g), 2.0 * chain.coupling_j * std::abs(1.0 - g)};
        write_row(os, row);
    }
    finish_output(os, path, cfg, "gap");
    report << "minimal gap " << format_real(min_gap(chain)) << " at g = " << format_real(min_gap_location(chain)) << "\n";
    return 0;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& report) {
    if (command == "simulate") return cmd_simulate(cfg, report);
    if (command == "sweep") return cmd_sweep(cfg, report);
    if (command == "schedule-gen") return cmd_schedule_gen(cfg, report);
    if (command == "compare-analytic") return cmd_compare_analytic(cfg, report);
    if (command == "min-tau") return cmd_min_tau(cfg, report);
    if (command == "echo-test") return cmd_echo_test(cfg, report);
    if (command == "gap") return cmd_gap(cfg, report);
    fail(ErrorCode::config_error, "unknown command '" + command + "'");
}

int exit_code_for(const Error& e) { return is_numeric_failure(e.code()) ? 3 : 2; }

} // namespace qecho
