#pragma once
// Decision procedures built on the echo: threshold test, tau_q sweeps, the
// minimal adiabatic tau_q search, segmented protocols, and a coarse regime
// label from the spectrum alone.
#include "qecho/dynamics.hpp"
#include "qecho/observables.hpp"
#include "qecho/schedule.hpp"

#include <span>
#include <vector>

namespace qecho {

inline constexpr double default_echo_threshold = 0.999;
inline constexpr double default_search_threshold = 0.9;

enum class Verdict { adiabatic, not_adiabatic };
enum class Regime { adiabatic, intermediate, impulse, unknown };
const char* to_string(Verdict v);
const char* to_string(Regime r);

// Linear sweep at rate 1/tau_q over [gT, g0]:
//   adiabatic if pi tau_q Dmin^2 / (2 J) >= lz_exponent, Dmin the smallest gap on the window
//     (the Landau-Zener exponent of the softest mode);
//   impulse   if |g0 - gT| tau_q Dmax <= impulse_phase, Dmax the largest gap on the window;
//   intermediate otherwise.
// The adiabatic test is applied first, so labels never reverse along tau_q.
struct RegimeThresholds {
    double lz_exponent = 3.0;
    double impulse_phase = 1.0;
};
Regime classify_regime(const Chain& chain, double tau_q, double g0, double gt, const RegimeThresholds& th = {});

struct EchoReport {
    double fidelity = 1.0;
    double threshold = default_echo_threshold;
    Verdict verdict = Verdict::adiabatic;
    Regime regime_hint = Regime::unknown;
    ObservableSet observables;
    double delay_used = 0.0;
};

// forward, hold(end, delay) when delay > 0, then forward reversed.
Schedule echo_with_delay(const Schedule& forward, double delay);

// regime_hint is filled only when `forward` is a single linear ramp.
EchoReport echo_test(const Chain& chain, const Schedule& forward, double delay, double threshold,
                     const IntegratorConfig& cfg, const RegimeThresholds& th = {});

struct SweepRow {
    double tau_q = 0.0;
    double fidelity = 1.0;
    double magnetization = 1.0;
    double kink_density = 0.0;
    double residual_energy = 0.0;
};
using SweepTable = std::vector<SweepRow>;

// Grid points run concurrently; rows come back in grid order.
SweepTable sweep_tau(const Chain& chain, std::span<const double> tau_grid, double delay, double g0, double gt,
                     const IntegratorConfig& cfg);

std::vector<double> geometric_grid(double lo, double hi, int points);
std::vector<double> uniform_grid(double lo, double hi, int points);

struct SearchOptions {
    double floor = 1.0;
    double ceiling = 1e4;
    double ratio = 1.1;
    int window = 5;           // grid points after the candidate that must also pass
    double rel_width = 0.01;  // bisection stops when hi / lo - 1 <= rel_width
};

struct MinTauResult {
    double tau_c = 0.0;
    double fidelity = 1.0; // echo fidelity at tau_c
    int evaluations = 0;
    bool at_floor = false;
};

// Smallest tau_q on the geometric grid whose echo fidelity, and that of the
// next `window` grid points, reach the threshold; refined by bisection in
// log tau_q against the preceding failing grid point.
MinTauResult min_adiabatic_tau(const Chain& chain, double g0, double gt, double threshold, double delay,
                               const IntegratorConfig& cfg, const SearchOptions& opts = {});

struct SegmentedProtocol {
    Schedule forward;
    std::vector<double> edges;  // M + 1 values from g0 to gT
    std::vector<double> tau_c;  // per sub-interval
    std::vector<double> rates;  // 1 / tau_c
    double total_duration = 0.0;
};

// M equal sub-intervals, each searched independently with an echo confined
// to that sub-interval.
SegmentedProtocol segmented_protocol(const Chain& chain, double g0, double gt, int segments, double threshold,
                                     double delay, const IntegratorConfig& cfg, const SearchOptions& opts = {});

// KZM and RC forward schedules on a shared clock for the gap-criteria
// comparison. Both start at curve time -start_fraction * gamma / (2 J sin(pi/N))
// and end where the RC curve's domain ends, gamma' N / (4 J); RC uses
// gamma' = 2 gamma / pi so that the unclamped durations agree.
struct UniformPair {
    Schedule kzm;
    Schedule rc;
    double t_begin = 0.0; // curve time of the first sample
    double t_end = 0.0;
    double gamma_prime = 0.0;
};
UniformPair uniform_pair(const Chain& chain, double gamma, double start_fraction);

} // namespace qecho
