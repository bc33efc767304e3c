#pragma once

// Control trajectories g(t): piecewise compositions of linear ramps, holds,
// and the two uniformly adiabatic curves (gap-rate and gap-squared rate).

#include "qecho/tfim.hpp"

#include <utility>
#include <vector>

namespace qecho {

enum class SegmentKind { linear, hold, kzm_branch, rc_branch };

const char* to_string(SegmentKind kind);

struct ScheduleSample {
    double g = 0.0;
    double g_dot = 0.0;
};

// One analytic piece. Local time runs over [0, duration()]. Internally each
// non-hold piece is a window [u_begin, u_end] of a monotone increasing-or-
// decreasing generating curve f(u); a reversed piece traverses it backwards.
class Segment {
public:
    static Segment linear(double g_start, double g_end, double duration);
    static Segment hold(double g, double duration);
    // branch = -1 for g < cos(pi/N), +1 above; u is the curve's own time
    // measured from the join.
    static Segment kzm_branch(const Chain& chain, double gamma, int branch, double u_begin, double u_end);
    static Segment rc_branch(const Chain& chain, double gamma_prime, double u_begin, double u_end);

    SegmentKind kind() const { return kind_; }
    double duration() const { return duration_; }
    bool is_hold() const { return kind_ == SegmentKind::hold; }

    double value(double tau) const;
    double rate(double tau) const;
    double start_value() const { return value(0.0); }
    double end_value() const { return value(duration_); }

    // Inverse map for monotone pieces: local time at which g is reached, and
    // dt/dg there. dt/dg stays finite at the KZM join where dg/dt diverges.
    double local_time_of(double g) const;
    double time_per_g(double g) const;
    // Curve time u at which the generating curve takes the value g.
    double curve_time_of(double g) const { return curve_inverse(g); }

    Segment reversed() const;

private:
    double curve(double u) const;
    double curve_rate(double u) const;
    double curve_inverse(double g) const;
    double curve_inverse_slope(double g) const;
    double to_curve_time(double tau) const { return reversed_ ? u_end_ - tau : u_begin_ + tau; }

    SegmentKind kind_ = SegmentKind::hold;
    double duration_ = 0.0;
    double u_begin_ = 0.0;
    double u_end_ = 0.0;
    bool reversed_ = false;
    // linear: a = g at u=0, b = g at u=duration. hold: a = g.
    // kzm:    a = center, b = sin(pi/N), c = gamma, d = J, branch.
    // rc:     a = center, b = sin(pi/N), c = gamma', d = J.
    double a_ = 0.0, b_ = 0.0, c_ = 0.0, d_ = 0.0;
    int branch_ = 0;
};

class Schedule {
public:
    Schedule() = default;
    explicit Schedule(std::vector<Segment> segments);

    bool empty() const { return segments_.empty(); }
    double total_duration() const { return starts_.empty() ? 0.0 : starts_.back(); }
    const std::vector<Segment>& segments() const { return segments_; }
    double segment_start(std::size_t i) const { return starts_[i]; }

    // Throws out-of-domain outside [0, T] (1e-12 relative slack at the ends).
    // At interior breakpoints the right-limit derivative is returned.
    ScheduleSample eval(double t) const;
    double value(double t) const { return eval(t).g; }
    double start_value() const;
    double end_value() const;

    // Segment boundaries including 0 and T, strictly increasing.
    std::vector<double> breakpoints() const;

private:
    std::vector<Segment> segments_;
    std::vector<double> starts_; // size = segments + 1
};

Schedule linear(double g_start, double g_end, double tau_q);
Schedule hold(double g, double delta_t);
Schedule concat(const Schedule& a, const Schedule& b);
Schedule reverse(const Schedule& s);
// s followed by its time reflection; duration doubles.
Schedule echo(const Schedule& s);
// Piecewise-linear interpolation of (t, g) samples; equal neighbours become holds.
Schedule piecewise_linear(const std::vector<std::pair<double, double>>& samples);

// Gap-rate (Kibble-Zurek) schedule: |Delta / dDelta/dt| = gamma / Delta, with
// the minimal gap reached at the join. Increasing g from g_lo to g_hi.
Schedule kzm_schedule(const Chain& chain, double gamma, double g_lo, double g_hi);
// Gap-squared (Roland-Cerf) schedule g = cos(pi/N) + sin(pi/N) tan(2 J sin(pi/N) t / gamma').
Schedule rc_schedule(const Chain& chain, double gamma_prime, double g_lo, double g_hi);

// Unclamped durations: gamma / (J sin(pi/N)) and gamma' N / (2 J).
double kzm_unclamped_duration(const Chain& chain, double gamma);
double rc_unclamped_duration(const Chain& chain, double gamma_prime);
// Curve values at curve time u measured from the join / midpoint.
double kzm_value(const Chain& chain, double gamma, double u);
double rc_value(const Chain& chain, double gamma_prime, double u);
// Time from the start of the clamped schedule to the join / midpoint.
double kzm_join_time(const Chain& chain, double gamma, double g_lo);
double rc_mid_time(const Chain& chain, double gamma_prime, double g_lo);

} // namespace qecho
