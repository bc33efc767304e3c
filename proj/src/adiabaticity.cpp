#include "qecho/adiabaticity.hpp"

#include "qecho/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <omp.h>

namespace qecho {

const char* to_string(Verdict v) { return v == Verdict::adiabatic ? "adiabatic" : "not-adiabatic"; }

const char* to_string(Regime r) {
    switch (r) {
    case Regime::adiabatic: return "adiabatic";
    case Regime::intermediate: return "intermediate";
    case Regime::impulse: return "impulse";
    case Regime::unknown: break;
    }
    return "unknown";
}

static double gap_min_on(const Chain& chain, double a, double b) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double g = std::clamp(min_gap_location(chain), lo, hi);
    return gap(chain, g);
}

static double gap_max_on(const Chain& chain, double a, double b) { return std::max(gap(chain, a), gap(chain, b)); }

Regime classify_regime(const Chain& chain, double tau_q, double g0, double gt, const RegimeThresholds& th) {
    chain.validate();
    if (!(tau_q > 0.0)) fail(ErrorCode::nonpositive_rate, "tau_q must be positive");
    const double dmin = gap_min_on(chain, g0, gt);
    if (std::numbers::pi * tau_q * dmin * dmin / (2.0 * chain.coupling_j) >= th.lz_exponent) return Regime::adiabatic;
    if (std::abs(g0 - gt) * tau_q * gap_max_on(chain, g0, gt) <= th.impulse_phase) return Regime::impulse;
    return Regime::intermediate;
}

Schedule echo_with_delay(const Schedule& forward, double delay) {
    if (forward.empty()) fail(ErrorCode::empty_schedule, "echo of an empty schedule");
    if (delay < 0.0) fail(ErrorCode::negative_duration, "negative delay");
    if (delay == 0.0) return echo(forward);
    return concat(concat(forward, hold(forward.end_value(), delay)), reverse(forward));
}

EchoReport echo_test(const Chain& chain, const Schedule& forward, double delay, double threshold,
                     const IntegratorConfig& cfg, const RegimeThresholds& th) {
    chain.validate();
    if (!(threshold > 0.0 && threshold <= 1.0)) fail(ErrorCode::invalid_argument, "threshold must lie in (0, 1]");
    const Schedule full = echo_with_delay(forward, delay);
    IntegratorConfig run = cfg;
    run.sample_count = 2;
    const TrajectoryTrace trace = evolve_chain(chain, full, run);

    EchoReport rep;
    rep.observables = observe(trace.final_states, chain, full.end_value());
    rep.fidelity = rep.observables.p_gs;
    rep.observables.fidelity = rep.fidelity;
    rep.threshold = threshold;
    rep.verdict = rep.fidelity >= threshold ? Verdict::adiabatic : Verdict::not_adiabatic;
    rep.delay_used = delay;
    const auto& segs = forward.segments();
    if (segs.size() == 1 && segs[0].kind() == SegmentKind::linear) {
        const double g0 = segs[0].start_value(), gt = segs[0].end_value();
        rep.regime_hint = classify_regime(chain, forward.total_duration() / std::abs(g0 - gt), g0, gt, th);
    }
    return rep;
}

static SweepRow sweep_point(const Chain& chain, double tau, double delay, double g0, double gt,
                            const IntegratorConfig& cfg) {
    const EchoReport rep = echo_test(chain, linear(g0, gt, tau), delay, 1.0, cfg);
    return {tau, rep.fidelity, rep.observables.magnetization, rep.observables.kink_density,
            rep.observables.residual_energy};
}

SweepTable sweep_tau(const Chain& chain, std::span<const double> tau_grid, double delay, double g0, double gt,
                     const IntegratorConfig& cfg) {
    chain.validate();
    cfg.validate();
    if (tau_grid.empty()) fail(ErrorCode::invalid_argument, "empty tau grid");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > 0.0)) fail(ErrorCode::nonpositive_rate, "tau grid values must be positive");
        if (i && !(tau_grid[i] > tau_grid[i - 1])) fail(ErrorCode::invalid_argument, "tau grid must be increasing");
    }
    SweepTable rows(tau_grid.size());
    std::exception_ptr err;
    const long n = static_cast<long>(tau_grid.size());
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
    for (long i = 0; i < n; ++i) {
        try {
            rows[i] = sweep_point(chain, tau_grid[i], delay, g0, gt, cfg);
        } catch (...) {
#pragma omp critical(qecho_sweep_error)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return rows;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi >= lo) || points < 1) fail(ErrorCode::invalid_argument, "bad geometric grid");
    if (points == 1) return {lo};
    std::vector<double> out(points);
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) out[i] = lo * std::exp(step * i);
    out.back() = hi;
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (!(hi >= lo) || points < 1) fail(ErrorCode::invalid_argument, "bad uniform grid");
    if (points == 1) return {lo};
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) out[i] = lo + (hi - lo) * i / (points - 1);
    out.back() = hi;
    return out;
}

MinTauResult min_adiabatic_tau(const Chain& chain, double g0, double gt, double threshold, double delay,
                               const IntegratorConfig& cfg, const SearchOptions& opts) {
    chain.validate();
    cfg.validate();
    if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorCode::invalid_argument, "threshold must lie in (0, 1)");
    if (!(opts.floor > 0.0 && opts.ceiling > opts.floor && opts.ratio > 1.0 && opts.ratio <= 1.1 &&
          opts.window >= 0 && opts.rel_width > 0.0))
        fail(ErrorCode::invalid_argument, "bad search options");
    if (g0 == gt) fail(ErrorCode::invalid_argument, "search window has zero width");

    std::vector<double> grid;
    for (double t = opts.floor; t <= opts.ceiling * (1.0 + 1e-12); t *= opts.ratio) grid.push_back(t);

    MinTauResult res;
    std::vector<double> fid;
    const std::size_t batch = static_cast<std::size_t>(opts.window) + 1;
    std::size_t run = 0; // consecutive passes ending at the last evaluated point
    std::size_t found = grid.size();
    while (found == grid.size() && fid.size() < grid.size()) {
        const std::size_t lo = fid.size(), hi = std::min(grid.size(), lo + batch);
        const SweepTable rows =
            sweep_tau(chain, std::span<const double>(grid.data() + lo, hi - lo), delay, g0, gt, cfg);
        res.evaluations += static_cast<int>(rows.size());
        for (const auto& r : rows) {
            fid.push_back(r.fidelity);
            run = r.fidelity >= threshold ? run + 1 : 0;
            if (run == batch) {
                found = fid.size() - batch;
                break;
            }
        }
    }
    if (found == grid.size())
        fail(ErrorCode::no_bracket, "threshold not sustained below the search ceiling");

    if (found == 0) {
        res.tau_c = grid[0];
        res.fidelity = fid[0];
        res.at_floor = true;
        return res;
    }
    double t_lo = grid[found - 1], t_hi = grid[found], f_hi = fid[found];
    while (t_hi / t_lo - 1.0 > opts.rel_width) {
        const double mid = std::sqrt(t_lo * t_hi);
        const double f = sweep_point(chain, mid, delay, g0, gt, cfg).fidelity;
        ++res.evaluations;
        if (f >= threshold) {
            t_hi = mid;
            f_hi = f;
        } else {
            t_lo = mid;
        }
    }
    res.tau_c = t_hi;
    res.fidelity = f_hi;
    return res;
}

SegmentedProtocol segmented_protocol(const Chain& chain, double g0, double gt, int segments, double threshold,
                                     double delay, const IntegratorConfig& cfg, const SearchOptions& opts) {
    if (segments < 1) fail(ErrorCode::invalid_argument, "segment count must be positive");
    SegmentedProtocol out;
    out.edges.resize(segments + 1);
    for (int i = 0; i <= segments; ++i) out.edges[i] = g0 + (gt - g0) * i / segments;
    out.edges.back() = gt;
    out.tau_c.assign(segments, 0.0);

    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
    for (int i = 0; i < segments; ++i) {
        try {
            out.tau_c[i] = min_adiabatic_tau(chain, out.edges[i], out.edges[i + 1], threshold, delay, cfg, opts).tau_c;
        } catch (...) {
#pragma omp critical(qecho_segment_error)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    for (int i = 0; i < segments; ++i) {
        out.rates.push_back(1.0 / out.tau_c[i]);
        out.forward = concat(out.forward, linear(out.edges[i], out.edges[i + 1], out.tau_c[i]));
    }
    out.total_duration = out.forward.total_duration();
    return out;
}

UniformPair uniform_pair(const Chain& chain, double gamma, double start_fraction) {
    chain.validate();
    if (!(gamma > 0.0)) fail(ErrorCode::invalid_argument, "gamma must be positive");
    if (!(start_fraction > 0.0 && start_fraction <= 1.0))
        fail(ErrorCode::invalid_argument, "start fraction must lie in (0, 1]");
    const double j = chain.coupling_j;
    const double s = std::sin(std::numbers::pi / chain.n_sites);
    const double t0 = gamma / (2.0 * j * s);

    UniformPair p;
    p.gamma_prime = 2.0 * gamma / std::numbers::pi;
    p.t_end = p.gamma_prime * chain.n_sites / (4.0 * j);
    p.t_begin = -start_fraction * std::min(t0, p.t_end);
    p.kzm = Schedule({Segment::kzm_branch(chain, gamma, -1, p.t_begin, 0.0),
                      Segment::kzm_branch(chain, gamma, +1, 0.0, p.t_end)});
    p.rc = Schedule({Segment::rc_branch(chain, p.gamma_prime, p.t_begin, p.t_end)});
    return p;
}

} // namespace qecho
