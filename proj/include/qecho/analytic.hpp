#pragma once

// Closed-form results used as oracles and for comparison with the
// integrator: complex Gamma, Landau-Zener asymptotics, echo fidelities,
// and the Kibble-Zurek freeze-out scaling.

#include "qecho/tfim.hpp"

#include <complex>

namespace qecho {

// Lanczos approximation (g = 7, 9 terms) with reflection for Re z < 1/2.
// Throws `pole` at nonpositive integers.
std::complex<double> complex_gamma(std::complex<double> z);

struct LzAmplitudes {
    std::complex<double> u;
    std::complex<double> v;
    bool valid = true; // 4 tau_q (cos k - g)^2 >= 10
};

// Weber-function asymptotics of the forward sweep, evaluated at control value g:
// |u|^2 = exp(-2 pi tau_q sin^2 k), |v|^2 = 1 - |u|^2.
LzAmplitudes lz_asymptotic(double k, double g, double tau_q);

enum class ModeRange {
    up_to_half_pi, // 0 < k <= pi/2
    all_modes,
};

// `stokes` adds the constant pi/4 of the Weber asymptotics to phi_k, which is
// what lines the product up with the exact two-passage interference; `printed`
// keeps phi_k = 2 tau_q [d^2 + sin^2 k ln sqrt(4 tau_q d^2)], d = cos k - g_T.
enum class PhaseConvention { stokes, printed };

struct IntermediateFidelity {
    double fidelity = 1.0;
    int modes_used = 0;
    int modes_excluded = 0; // cos k == g_T, where the phase has a log singularity
};

// Two-path interference product for the linear echo turning at g_t.
// Throws invalid-turnaround if |g_t| >= 1.
IntermediateFidelity fidelity_intermediate(const Chain& chain, double tau_q, double g_t,
                                           ModeRange range = ModeRange::up_to_half_pi,
                                           PhaseConvention conv = PhaseConvention::stokes);

// Single-mode factor of the product above, and its phase phi_k.
double intermediate_mode_factor(double k, double tau_q, double g_t, PhaseConvention conv = PhaseConvention::stokes);
double intermediate_phase(double k, double tau_q, double g_t, PhaseConvention conv = PhaseConvention::stokes);

// Impulse-limit echo fidelity after a hold of delta_t at g_t:
// prod_k (1 - sin^2 k sin^2(Lambda_k(g_t) delta_t) / (1 - 2 g_t cos k + g_t^2)).
double fidelity_free_evolution(const Chain& chain, double g_t, double delta_t);

// t_hat = tau_q^{z nu / (1 + z nu)}, unit prefactor.
double freezeout_time(double tau_q, double z, double nu);

} // namespace qecho
