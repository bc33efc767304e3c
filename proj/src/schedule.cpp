#include "qecho/schedule.hpp"

#include "qecho/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qecho {

namespace {

constexpr double join_tolerance = 1e-12;

double chain_s(const Chain& chain) { return std::sin(std::numbers::pi / chain.n_sites); }

double kzm_half_width(const Chain& chain, double gamma) {
    return gamma / (2.0 * chain.coupling_j * chain_s(chain));
}

double rc_half_width(const Chain& chain, double gamma_prime) {
    return gamma_prime * chain.n_sites / (4.0 * chain.coupling_j);
}

void check_window(const Chain& chain, double g_lo, double g_hi) {
    const double c = min_gap_location(chain);
    if (!(g_lo < c && c < g_hi))
        fail(ErrorCode::bounds_error, "need g_lo < cos(pi/N) < g_hi, got [" + std::to_string(g_lo) + ", " +
                                          std::to_string(g_hi) + "]");
}

} // namespace

const char* to_string(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::linear: return "linear";
    case SegmentKind::hold: return "hold";
    case SegmentKind::kzm_branch: return "kzm_branch";
    case SegmentKind::rc_branch: return "rc_branch";
    }
    return "unknown";
}

Segment Segment::linear(double g_start, double g_end, double duration) {
    if (!(duration > 0.0)) fail(ErrorCode::nonpositive_rate, "linear segment needs positive duration");
    Segment seg;
    seg.kind_ = SegmentKind::linear;
    seg.duration_ = duration;
    seg.u_begin_ = 0.0;
    seg.u_end_ = duration;
    seg.a_ = g_start;
    seg.b_ = g_end;
    return seg;
}

Segment Segment::hold(double g, double duration) {
    if (duration < 0.0) fail(ErrorCode::negative_duration, "hold duration must be >= 0");
    Segment seg;
    seg.kind_ = SegmentKind::hold;
    seg.duration_ = duration;
    seg.u_end_ = duration;
    seg.a_ = g;
    return seg;
}

Segment Segment::kzm_branch(const Chain& chain, double gamma, int branch, double u_begin, double u_end) {
    Segment seg;
    seg.kind_ = SegmentKind::kzm_branch;
    seg.u_begin_ = u_begin;
    seg.u_end_ = u_end;
    seg.duration_ = u_end - u_begin;
    seg.a_ = min_gap_location(chain);
    seg.b_ = chain_s(chain);
    seg.c_ = gamma;
    seg.d_ = chain.coupling_j;
    seg.branch_ = branch < 0 ? -1 : 1;
    if (!(seg.duration_ > 0.0)) fail(ErrorCode::bounds_error, "empty KZM branch window");
    return seg;
}

Segment Segment::rc_branch(const Chain& chain, double gamma_prime, double u_begin, double u_end) {
    Segment seg;
    seg.kind_ = SegmentKind::rc_branch;
    seg.u_begin_ = u_begin;
    seg.u_end_ = u_end;
    seg.duration_ = u_end - u_begin;
    seg.a_ = min_gap_location(chain);
    seg.b_ = chain_s(chain);
    seg.c_ = gamma_prime;
    seg.d_ = chain.coupling_j;
    if (!(seg.duration_ > 0.0)) fail(ErrorCode::bounds_error, "empty RC window");
    return seg;
}

double Segment::curve(double u) const {
    switch (kind_) {
    case SegmentKind::hold: return a_;
    case SegmentKind::linear:
        if (u >= duration_) return b_;
        return a_ + (b_ - a_) * (u / duration_);
    case SegmentKind::kzm_branch: {
        // g = c + branch * s * sqrt(m (2 T0 - m)) / (T0 - m), m = |u|; exact c at the join.
        const double t0 = c_ / (2.0 * d_ * b_);
        const double m = std::max(0.0, branch_ * u);
        return a_ + branch_ * b_ * std::sqrt(m * (2.0 * t0 - m)) / (t0 - m);
    }
    case SegmentKind::rc_branch: {
        const double omega = 2.0 * d_ * b_ / c_;
        return a_ + b_ * std::tan(omega * u);
    }
    }
    return 0.0;
}

double Segment::curve_rate(double u) const {
    switch (kind_) {
    case SegmentKind::hold: return 0.0;
    case SegmentKind::linear: return (b_ - a_) / duration_;
    case SegmentKind::kzm_branch: {
        const double slope = curve_inverse_slope(curve(u));
        return slope > 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
    }
    case SegmentKind::rc_branch: {
        const double omega = 2.0 * d_ * b_ / c_;
        const double t = std::tan(omega * u);
        return b_ * omega * (1.0 + t * t);
    }
    }
    return 0.0;
}

double Segment::curve_inverse(double g) const {
    switch (kind_) {
    case SegmentKind::hold: fail(ErrorCode::invalid_argument, "hold segment has no inverse");
    case SegmentKind::linear: return duration_ * (g - a_) / (b_ - a_);
    case SegmentKind::kzm_branch: {
        // u = branch (T0 - gamma/Delta(g)) written without cancellation near the join.
        const double t0 = c_ / (2.0 * d_ * b_);
        const double dg = g - a_;
        const double r = std::hypot(dg, b_);
        return branch_ * t0 * dg * dg / (r * (r + b_));
    }
    case SegmentKind::rc_branch: {
        const double omega = 2.0 * d_ * b_ / c_;
        return std::atan((g - a_) / b_) / omega;
    }
    }
    return 0.0;
}

double Segment::curve_inverse_slope(double g) const {
    switch (kind_) {
    case SegmentKind::hold: fail(ErrorCode::invalid_argument, "hold segment has no inverse");
    case SegmentKind::linear: return duration_ / (b_ - a_);
    case SegmentKind::kzm_branch: {
        const double dg = g - a_;
        const double q = dg * dg + b_ * b_;
        return c_ * std::abs(dg) / (2.0 * d_ * q * std::sqrt(q));
    }
    case SegmentKind::rc_branch: {
        const double omega = 2.0 * d_ * b_ / c_;
        const double dg = g - a_;
        return b_ / (omega * (dg * dg + b_ * b_));
    }
    }
    return 0.0;
}

double Segment::value(double tau) const { return curve(to_curve_time(tau)); }

double Segment::rate(double tau) const {
    const double r = curve_rate(to_curve_time(tau));
    return reversed_ ? -r : r;
}

double Segment::local_time_of(double g) const {
    const double u = curve_inverse(g);
    return reversed_ ? u_end_ - u : u - u_begin_;
}

double Segment::time_per_g(double g) const {
    const double s = curve_inverse_slope(g);
    return reversed_ ? -s : s;
}

Segment Segment::reversed() const {
    Segment seg = *this;
    if (kind_ != SegmentKind::hold) seg.reversed_ = !reversed_;
    return seg;
}

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
    starts_.reserve(segments_.size() + 1);
    double t = 0.0;
    starts_.push_back(t);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (i > 0) {
            const double jump = segments_[i].start_value() - segments_[i - 1].end_value();
            if (std::abs(jump) > join_tolerance)
                fail(ErrorCode::discontinuous_join, "segments " + std::to_string(i - 1) + " and " +
                                                        std::to_string(i) + " do not meet");
        }
        t += segments_[i].duration();
        starts_.push_back(t);
    }
}

ScheduleSample Schedule::eval(double t) const {
    if (segments_.empty()) fail(ErrorCode::empty_schedule, "cannot evaluate an empty schedule");
    const double total = total_duration();
    const double slack = 1e-12 * std::max(1.0, total);
    if (!(t >= -slack && t <= total + slack))
        fail(ErrorCode::out_of_domain, "t=" + std::to_string(t) + " outside [0, " + std::to_string(total) + "]");
    t = std::clamp(t, 0.0, total);
    const auto n = static_cast<std::ptrdiff_t>(segments_.size());
    auto it = std::upper_bound(starts_.begin(), starts_.begin() + n, t);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - starts_.begin()) - 1));
    const Segment& seg = segments_[i];
    const double tau = std::clamp(t - starts_[i], 0.0, seg.duration());
    return {seg.value(tau), seg.rate(tau)};
}

double Schedule::start_value() const {
    if (segments_.empty()) fail(ErrorCode::empty_schedule, "empty schedule has no start value");
    return segments_.front().start_value();
}

double Schedule::end_value() const {
    if (segments_.empty()) fail(ErrorCode::empty_schedule, "empty schedule has no end value");
    return segments_.back().end_value();
}

std::vector<double> Schedule::breakpoints() const {
    std::vector<double> out;
    for (double t : starts_)
        if (out.empty() || t > out.back()) out.push_back(t);
    if (out.empty()) out.push_back(0.0);
    return out;
}

Schedule linear(double g_start, double g_end, double tau_q) {
    if (!(tau_q > 0.0) || !std::isfinite(tau_q)) fail(ErrorCode::nonpositive_rate, "tau_q must be positive");
    if (g_start == g_end) fail(ErrorCode::invalid_argument, "linear ramp needs g_start != g_end");
    return Schedule({Segment::linear(g_start, g_end, std::abs(g_end - g_start) * tau_q)});
}

Schedule hold(double g, double delta_t) { return Schedule({Segment::hold(g, delta_t)}); }

Schedule concat(const Schedule& a, const Schedule& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (std::abs(a.end_value() - b.start_value()) > join_tolerance)
        fail(ErrorCode::discontinuous_join, "concat: end of first schedule (" + std::to_string(a.end_value()) +
                                                ") != start of second (" + std::to_string(b.start_value()) + ")");
    std::vector<Segment> segs = a.segments();
    for (const Segment& s : b.segments()) {
        if (s.is_hold() && !segs.empty() && segs.back().is_hold() &&
            std::abs(segs.back().value(0.0) - s.value(0.0)) <= join_tolerance) {
            segs.back() = Segment::hold(segs.back().value(0.0), segs.back().duration() + s.duration());
            continue;
        }
        segs.push_back(s);
    }
    return Schedule(std::move(segs));
}

Schedule reverse(const Schedule& s) {
    std::vector<Segment> segs;
    segs.reserve(s.segments().size());
    for (auto it = s.segments().rbegin(); it != s.segments().rend(); ++it) segs.push_back(it->reversed());
    return Schedule(std::move(segs));
}

Schedule echo(const Schedule& s) {
    if (s.empty()) fail(ErrorCode::empty_schedule, "echo of an empty schedule");
    return concat(s, reverse(s));
}

Schedule piecewise_linear(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 2) fail(ErrorCode::invalid_argument, "piecewise-linear schedule needs >= 2 samples");
    if (std::abs(samples.front().first) > 1e-12)
        fail(ErrorCode::invalid_argument, "piecewise-linear schedule must start at t=0");
    std::vector<Segment> segs;
    segs.reserve(samples.size() - 1);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto [t0, g0] = samples[i - 1];
        const auto [t1, g1] = samples[i];
        if (!(t1 > t0)) fail(ErrorCode::invalid_argument, "sample times must be strictly increasing");
        if (g0 == g1)
            segs.push_back(Segment::hold(g0, t1 - t0));
        else
            segs.push_back(Segment::linear(g0, g1, t1 - t0));
    }
    Schedule out;
    for (auto& seg : segs) out = concat(out, Schedule({seg}));
    return out;
}

Schedule kzm_schedule(const Chain& chain, double gamma, double g_lo, double g_hi) {
    chain.validate();
    if (!(gamma > 0.0)) fail(ErrorCode::invalid_argument, "gamma must be positive");
    check_window(chain, g_lo, g_hi);
    // Probe segments only to reuse the inverse map.
    const double t0 = kzm_half_width(chain, gamma);
    const Segment lower_probe = Segment::kzm_branch(chain, gamma, -1, -t0, 0.0);
    const Segment upper_probe = Segment::kzm_branch(chain, gamma, +1, 0.0, t0);
    const double u_lo = lower_probe.curve_time_of(g_lo);
    const double u_hi = upper_probe.curve_time_of(g_hi);
    return Schedule({Segment::kzm_branch(chain, gamma, -1, u_lo, 0.0),
                     Segment::kzm_branch(chain, gamma, +1, 0.0, u_hi)});
}

Schedule rc_schedule(const Chain& chain, double gamma_prime, double g_lo, double g_hi) {
    chain.validate();
    if (!(gamma_prime > 0.0)) fail(ErrorCode::invalid_argument, "gamma' must be positive");
    check_window(chain, g_lo, g_hi);
    const double half = rc_half_width(chain, gamma_prime);
    const Segment probe = Segment::rc_branch(chain, gamma_prime, -half, half);
    const double u_lo = probe.curve_time_of(g_lo);
    const double u_hi = probe.curve_time_of(g_hi);
    if (u_lo < -half || u_hi > half)
        fail(ErrorCode::bounds_error, "clamp values lie outside the RC domain |t| < gamma' N / (4 J)");
    return Schedule({Segment::rc_branch(chain, gamma_prime, u_lo, u_hi)});
}

double kzm_unclamped_duration(const Chain& chain, double gamma) {
    chain.validate();
    return gamma / (chain.coupling_j * chain_s(chain));
}

double rc_unclamped_duration(const Chain& chain, double gamma_prime) {
    chain.validate();
    return gamma_prime * chain.n_sites / (2.0 * chain.coupling_j);
}

double kzm_value(const Chain& chain, double gamma, double u) {
    const double t0 = kzm_half_width(chain, gamma);
    if (!(std::abs(u) < t0)) fail(ErrorCode::out_of_domain, "KZM curve time outside (-T/2, T/2)");
    const Segment seg = u < 0.0 ? Segment::kzm_branch(chain, gamma, -1, -t0, 0.0)
                                : Segment::kzm_branch(chain, gamma, +1, 0.0, t0);
    return u < 0.0 ? seg.value(u + t0) : seg.value(u);
}

double rc_value(const Chain& chain, double gamma_prime, double u) {
    const double half = rc_half_width(chain, gamma_prime);
    if (!(std::abs(u) <= half)) fail(ErrorCode::out_of_domain, "RC curve time outside the domain");
    return Segment::rc_branch(chain, gamma_prime, -half, half).value(u + half);
}

double kzm_join_time(const Chain& chain, double gamma, double g_lo) {
    chain.validate();
    if (!(g_lo < min_gap_location(chain))) fail(ErrorCode::bounds_error, "g_lo must lie below cos(pi/N)");
    const double t0 = kzm_half_width(chain, gamma);
    return -Segment::kzm_branch(chain, gamma, -1, -t0, 0.0).curve_time_of(g_lo);
}

double rc_mid_time(const Chain& chain, double gamma_prime, double g_lo) {
    chain.validate();
    if (!(g_lo < min_gap_location(chain))) fail(ErrorCode::bounds_error, "g_lo must lie below cos(pi/N)");
    const double half = rc_half_width(chain, gamma_prime);
    return -Segment::rc_branch(chain, gamma_prime, -half, half).curve_time_of(g_lo);
}

} // namespace qecho
