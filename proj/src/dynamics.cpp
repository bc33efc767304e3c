#include "qecho/dynamics.hpp"

#include "qecho/dormand_prince.hpp"
#include "qecho/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

namespace qecho {

namespace {

using State5 = OdeState<5>; // Re a, Im a, Re b, Im b, Phi

constexpr int default_steps_per_segment = 1000;

StepControl step_control(const IntegratorConfig& cfg) {
    StepControl ctl;
    ctl.rel_tol = cfg.rel_tol;
    ctl.abs_tol = cfg.abs_tol;
    return ctl;
}

// Interaction picture alpha = a e^{-i Phi}, beta = b e^{+i Phi}, dPhi/dt = 2 Lambda_k.
// With g as the variable and C = sin k g_dot / (2 (g^2 - 2 g cos k + 1)):
//   da/dg = -kappa b e^{2 i Phi},  db/dg = kappa a e^{-2 i Phi},  dPhi/dg = 2 Lambda dt/dg.
struct ModeRhs {
    double cos_k;
    double sin_k;
    double j;
    const Segment* seg;

    State5 operator()(double g, const State5& y) const {
        const double d = g - cos_k;
        const double q = d * d + sin_k * sin_k;
        const double kappa = sin_k / (2.0 * q);
        const double lambda = j * std::sqrt(q);
        const double c = std::cos(2.0 * y[4]);
        const double s = std::sin(2.0 * y[4]);
        // b e^{2 i Phi}
        const double br = y[2] * c - y[3] * s;
        const double bi = y[2] * s + y[3] * c;
        // a e^{-2 i Phi}
        const double ar = y[0] * c + y[1] * s;
        const double ai = y[1] * c - y[0] * s;
        return {-kappa * br, -kappa * bi, kappa * ar, kappa * ai, 2.0 * lambda * seg->time_per_g(g)};
    }
};

State5 to_interaction(const ModeState& st) {
    return {st.alpha.real(), st.alpha.imag(), st.beta.real(), st.beta.imag(), 0.0};
}

ModeState from_interaction(const State5& y) {
    const cplx phase = std::polar(1.0, y[4]);
    return {cplx(y[0], y[1]) * std::conj(phase), cplx(y[2], y[3]) * phase};
}

void run_modes(const Chain& chain, const Schedule& s, const IntegratorConfig& cfg, std::span<const double> times,
               std::vector<ModeEvolution>& results, bool parallel) {
    const auto modes = wave_vectors(chain);
    results.assign(modes.size(), {});
    const int count = static_cast<int>(modes.size());
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (int i = 0; i < count; ++i) {
        try {
            results[i] = evolve_mode(modes[i], s, chain.coupling_j, cfg, ModeState{}, times);
        } catch (...) {
#pragma omp critical(qecho_mode_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

TrajectoryTrace assemble(const Schedule& s, std::span<const double> times, std::vector<ModeEvolution>& results) {
    TrajectoryTrace trace;
    trace.samples.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        TraceSample& row = trace.samples[i];
        row.t = times[i];
        row.g = s.value(times[i]);
        row.mode_populations.reserve(results.size());
        double p = 1.0;
        for (const auto& r : results) {
            const double pop = r.samples[i].ground_population();
            row.mode_populations.push_back(pop);
            p *= pop;
        }
        row.p_gs = p;
    }
    trace.final_states.reserve(results.size());
    for (const auto& r : results) {
        trace.final_states.push_back(r.final_state);
        trace.total_steps += r.steps;
    }
    return trace;
}

TrajectoryTrace evolve_chain_impl(const Chain& chain, const Schedule& s, const IntegratorConfig& cfg, bool parallel) {
    chain.validate();
    cfg.validate();
    if (s.empty()) fail(ErrorCode::empty_schedule, "cannot evolve along an empty schedule");
    const auto times = trace_times(s, cfg.sample_count);
    std::vector<ModeEvolution> results;
    run_modes(chain, s, cfg, times, results, parallel);
    return assemble(s, times, results);
}

} // namespace

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        fail(ErrorCode::invalid_argument, "integrator tolerances must be positive");
    if (max_step < 0.0) fail(ErrorCode::invalid_argument, "max_step must be >= 0 (0 = automatic)");
    if (sample_count < 0) fail(ErrorCode::invalid_argument, "sample_count must be >= 0");
}

ModeState free_phase(const ModeState& state, double k, double g, double j, double delta_t) {
    const double phase = mode_energy(k, g, j) * delta_t;
    const cplx rot = std::polar(1.0, phase);
    return {state.alpha * std::conj(rot), state.beta * rot};
}

ModeEvolution evolve_mode(const WaveVector& k, const Schedule& s, double j, const IntegratorConfig& cfg,
                          const ModeState& initial, std::span<const double> sample_times) {
    cfg.validate();
    if (s.empty()) fail(ErrorCode::empty_schedule, "cannot evolve along an empty schedule");
    const double total = s.total_duration();
    const double eps = 1e-12 * std::max(1.0, total);

    ModeEvolution out;
    out.samples.reserve(sample_times.size());
    ModeState st = initial;
    std::size_t next = 0;
    const StepControl base = step_control(cfg);
    const ModeRhs proto{std::cos(k.k), std::sin(k.k), j, nullptr};

    const auto& segments = s.segments();
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& seg = segments[i];
        const double t_begin = s.segment_start(i);
        const double t_end = t_begin + seg.duration();

        if (seg.is_hold()) {
            const double g = seg.start_value();
            while (next < sample_times.size() && sample_times[next] <= t_end + eps) {
                const double dt = std::clamp(sample_times[next] - t_begin, 0.0, seg.duration());
                out.samples.push_back(free_phase(st, k.k, g, j, dt));
                ++next;
            }
            st = free_phase(st, k.k, g, j, seg.duration());
            continue;
        }

        ModeRhs rhs = proto;
        rhs.seg = &seg;
        const double g_begin = seg.start_value();
        const double g_end = seg.end_value();
        StepControl ctl = base;
        const double g_cap = std::abs(g_end - g_begin) / default_steps_per_segment;
        StepStats stats;
        double h = 0.0;
        double g_now = g_begin;
        State5 y = to_interaction(st);

        auto advance = [&](double g_target) {
            ctl.max_step = g_cap;
            if (cfg.max_step > 0.0) {
                const double dtdg =
                    std::max(std::abs(seg.time_per_g(g_now)), std::abs(seg.time_per_g(g_target)));
                if (dtdg > 0.0) ctl.max_step = std::min(ctl.max_step, cfg.max_step / dtdg);
            }
            y = dormand_prince<5>(rhs, g_now, g_target, y, ctl, h, &stats);
            g_now = g_target;
        };

        while (next < sample_times.size() && sample_times[next] <= t_end + eps) {
            const double tau = std::clamp(sample_times[next] - t_begin, 0.0, seg.duration());
            advance(seg.value(tau));
            out.samples.push_back(from_interaction(y));
            ++next;
        }
        advance(g_end);
        st = from_interaction(y);
        out.steps += stats.accepted;
    }
    // Samples past the end (rounding) see the final state.
    while (next < sample_times.size()) {
        out.samples.push_back(st);
        ++next;
    }
    out.final_state = st;
    return out;
}

std::vector<double> trace_times(const Schedule& s, int sample_count) {
    const double total = s.total_duration();
    std::vector<double> times = s.breakpoints();
    if (sample_count >= 2)
        for (int i = 0; i < sample_count; ++i)
            times.push_back(total * static_cast<double>(i) / static_cast<double>(sample_count - 1));
    std::sort(times.begin(), times.end());
    const double eps = 1e-12 * std::max(1.0, total);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times)
        if (out.empty() || t - out.back() > eps) out.push_back(t);
    return out;
}

TrajectoryTrace evolve_chain(const Chain& chain, const Schedule& s, const IntegratorConfig& cfg) {
    return evolve_chain_impl(chain, s, cfg, !omp_in_parallel());
}

TrajectoryTrace evolve_chain_serial(const Chain& chain, const Schedule& s, const IntegratorConfig& cfg) {
    return evolve_chain_impl(chain, s, cfg, false);
}

namespace {

// Eigenvectors of 1/2 (x sigma_z + sigma_x) in the (v, u) basis.
struct LzLevels {
    double upper_v, upper_u, lower_v, lower_u;
};

LzLevels lz_levels(double x) {
    const double phi = std::atan2(1.0, x);
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);
    return {c, s, -s, c};
}

} // namespace

LzEvolution lz_mode_evolve(const WaveVector& k, double tau_q, double g_lo, double g_hi, const IntegratorConfig& cfg) {
    const double sin_k = std::sin(k.k);
    const double cos_k = std::cos(k.k);
    const double tq = 4.0 * tau_q * sin_k * sin_k;
    const double x0 = 4.0 * tau_q * sin_k * (cos_k - g_hi) / tq;
    const LzLevels lv = lz_levels(x0);
    // The A1 matrix is minus the physical mode Hamiltonian, so the physical
    // ground level is its upper eigenvector.
    return lz_mode_evolve(k, tau_q, g_lo, g_hi, cfg, cplx(lv.upper_v), cplx(lv.upper_u));
}

LzEvolution lz_mode_evolve(const WaveVector& k, double tau_q, double g_lo, double g_hi, const IntegratorConfig& cfg,
                           cplx v0, cplx u0) {
    cfg.validate();
    if (!(tau_q > 0.0)) fail(ErrorCode::nonpositive_rate, "tau_q must be positive");
    const double sin_k = std::sin(k.k);
    if (std::abs(sin_k) < 1e-15) fail(ErrorCode::invalid_argument, "sin k must be nonzero");
    if (!(g_hi > g_lo)) fail(ErrorCode::invalid_argument, "need g_lo < g_hi");
    const double cos_k = std::cos(k.k);
    const double tq = 4.0 * tau_q * sin_k * sin_k;
    const double tp0 = 4.0 * tau_q * sin_k * (cos_k - g_hi);
    const double tp1 = 4.0 * tau_q * sin_k * (cos_k - g_lo);

    // v = V e^{-i theta}, u = U e^{+i theta}, theta = t'^2 / (4 tq'), so
    // dV/dt' = -(i/2) U e^{2 i theta}, dU/dt' = -(i/2) V e^{-2 i theta}.
    auto theta = [tq](double tp) { return tp * tp / (4.0 * tq); };
    auto rhs = [&](double tp, const OdeState<4>& y) -> OdeState<4> {
        const double c = std::cos(2.0 * theta(tp));
        const double s = std::sin(2.0 * theta(tp));
        const double ur = y[2] * c - y[3] * s; // U e^{2 i theta}
        const double ui = y[2] * s + y[3] * c;
        const double vr = y[0] * c + y[1] * s; // V e^{-2 i theta}
        const double vi = y[1] * c - y[0] * s;
        return {0.5 * ui, -0.5 * ur, 0.5 * vi, -0.5 * vr};
    };

    const cplx start_phase = std::polar(1.0, theta(tp0));
    const cplx V0 = v0 * start_phase;
    const cplx U0 = u0 * std::conj(start_phase);
    OdeState<4> y{V0.real(), V0.imag(), U0.real(), U0.imag()};

    StepControl ctl = step_control(cfg);
    ctl.max_step = std::abs(tp1 - tp0) / default_steps_per_segment;
    if (cfg.max_step > 0.0) ctl.max_step = std::min(ctl.max_step, cfg.max_step * 4.0 * std::abs(sin_k));
    double h = 0.0;
    y = dormand_prince<4>(rhs, tp0, tp1, y, ctl, h);

    const cplx end_phase = std::polar(1.0, theta(tp1));
    LzEvolution out;
    out.v = cplx(y[0], y[1]) * std::conj(end_phase);
    out.u = cplx(y[2], y[3]) * end_phase;
    out.t_prime_begin = tp0;
    out.t_prime_end = tp1;
    const LzLevels lv = lz_levels(tp1 / tq);
    out.adiabatic.beta = lv.upper_v * out.v + lv.upper_u * out.u;
    out.adiabatic.alpha = lv.lower_v * out.v + lv.lower_u * out.u;
    return out;
}

} // namespace qecho
