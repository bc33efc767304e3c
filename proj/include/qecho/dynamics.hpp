#pragma once

// Time evolution of the momentum modes in the instantaneous eigenbasis,
// the Landau-Zener frame used as a cross-check, and whole-chain traces.

#include "qecho/schedule.hpp"
#include "qecho/tfim.hpp"

#include <complex>
#include <span>
#include <vector>

namespace qecho {

using cplx = std::complex<double>;

// alpha: amplitude on the instantaneous excited level |+>_k,
// beta:  amplitude on the instantaneous ground level |->_k.
struct ModeState {
    cplx alpha{0.0, 0.0};
    cplx beta{1.0, 0.0};

    double excited_population() const { return std::norm(alpha); }
    double ground_population() const { return std::norm(beta); }
    double norm() const { return std::sqrt(std::norm(alpha) + std::norm(beta)); }
};

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // Upper bound on the time step; 0 selects the default of 1/1000 of each
    // segment's g-range.
    double max_step = 0.0;
    int sample_count = 201;

    void validate() const;
};

struct ModeEvolution {
    ModeState final_state;
    std::vector<ModeState> samples; // one per requested sample time
    long steps = 0;
};

// Free evolution at fixed g: alpha *= exp(-i Lambda dt), beta *= exp(+i Lambda dt).
ModeState free_phase(const ModeState& state, double k, double g, double j, double delta_t);

// Integrates the two-level equation of mode k along the schedule. Monotone
// segments are integrated with g as the independent variable in the
// interaction picture; holds use free_phase. `sample_times` must be sorted
// and inside [0, T].
ModeEvolution evolve_mode(const WaveVector& k, const Schedule& s, double j, const IntegratorConfig& cfg,
                          const ModeState& initial = {}, std::span<const double> sample_times = {});

struct TraceSample {
    double t = 0.0;
    double g = 0.0;
    double p_gs = 1.0;
    std::vector<double> mode_populations; // |beta_k|^2 in k order
};

struct TrajectoryTrace {
    std::vector<TraceSample> samples;
    std::vector<ModeState> final_states; // k order
    long total_steps = 0;

    double final_p_gs() const { return samples.empty() ? 1.0 : samples.back().p_gs; }
};

// sample_count uniform times over [0, T] merged with every breakpoint.
std::vector<double> trace_times(const Schedule& s, int sample_count);

// All N/2 modes from (alpha, beta) = (0, 1). Modes are distributed over
// OpenMP threads; results are assembled in fixed k order.
TrajectoryTrace evolve_chain(const Chain& chain, const Schedule& s, const IntegratorConfig& cfg);
// Single-threaded reference with the identical per-mode kernel.
TrajectoryTrace evolve_chain_serial(const Chain& chain, const Schedule& s, const IntegratorConfig& cfg);

// Landau-Zener frame: i d/dt' (v, u) = 1/2 [[t'/tq', 1], [1, -t'/tq']] (v, u)
// with t' = 4 tau_q sin k (cos k - g), tq' = 4 tau_q sin^2 k, for the linear
// sweep g: g_hi -> g_lo at J = 1.
struct LzEvolution {
    cplx v{0.0, 0.0};
    cplx u{1.0, 0.0};
    ModeState adiabatic; // projection on the instantaneous levels at g_lo
    double t_prime_begin = 0.0;
    double t_prime_end = 0.0;
};

// Starts in the instantaneous level that connects to the ground state
// ((v, u) -> (0, 1) as g_hi -> infinity) unless `initial_vu` is given.
LzEvolution lz_mode_evolve(const WaveVector& k, double tau_q, double g_lo, double g_hi, const IntegratorConfig& cfg);
LzEvolution lz_mode_evolve(const WaveVector& k, double tau_q, double g_lo, double g_hi, const IntegratorConfig& cfg,
                           cplx v0, cplx u0);

} // namespace qecho
