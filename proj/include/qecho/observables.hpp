#pragma once

// Scalar diagnostics of a product of mode states. Each positive-k mode
// stands for the (k, -k) pair and carries multiplicity 2 in per-site sums.

#include "qecho/dynamics.hpp"

#include <span>

namespace qecho {

struct ObservableSet {
    double fidelity = 1.0;
    double p_gs = 1.0;
    double magnetization = 1.0;
    double kink_density = 0.0;
    double residual_energy = 0.0;
};

// prod_k |beta_k|^2
double p_ground(std::span<const ModeState> states);

// (2/N) sum_k 2 |beta_k|^2 - 1; throws count-mismatch unless N/2 states are given.
double magnetization(std::span<const ModeState> states, int n_sites);

// (2/N) sum_k |alpha_k|^2
double kink_density(std::span<const ModeState> states, int n_sites);

// sum_k 2 * 2 Lambda_k(g) |alpha_k|^2
double residual_energy(std::span<const ModeState> states, std::span<const WaveVector> k_list, double g, double j);

// All of the above at control value g. `fidelity` equals p_gs here; the
// caller decides whether the states sit at the end of an echo.
ObservableSet observe(std::span<const ModeState> states, const Chain& chain, double g);

} // namespace qecho
