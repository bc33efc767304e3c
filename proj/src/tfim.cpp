#include "qecho/tfim.hpp"

#include "qecho/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qecho {

void Chain::validate() const {
    if (n_sites < 2 || n_sites % 2 != 0)
        fail(ErrorCode::invalid_chain, "n_sites must be even and >= 2, got " + std::to_string(n_sites));
    if (!(coupling_j > 0.0) || !std::isfinite(coupling_j))
        fail(ErrorCode::invalid_chain, "coupling_j must be positive");
    if (g_critical == 0.0)
        fail(ErrorCode::zero_critical_point, "g_critical must be nonzero");
}

std::vector<WaveVector> wave_vectors(const Chain& chain) {
    chain.validate();
    const int half = chain.mode_count();
    std::vector<WaveVector> out;
    out.reserve(half);
    for (int s = 0; s < half; ++s)
        out.push_back({(2.0 * s + 1.0) * std::numbers::pi / chain.n_sites, s});
    return out;
}

double mode_energy(double k, double g, double j) {
    // (g - cos k)^2 + sin^2 k avoids cancellation near the crossing.
    const double d = g - std::cos(k);
    const double s = std::sin(k);
    return j * std::sqrt(d * d + s * s);
}

double gap(const Chain& chain, double g) {
    return 2.0 * mode_energy(std::numbers::pi / chain.n_sites, g, chain.coupling_j);
}

double gap_slope(const Chain& chain, double g) {
    const double j = chain.coupling_j;
    const double c = min_gap_location(chain);
    return 4.0 * j * j * (g - c) / gap(chain, g);
}

double min_gap(const Chain& chain) {
    return 2.0 * chain.coupling_j * std::sin(std::numbers::pi / chain.n_sites);
}

double min_gap_location(const Chain& chain) { return std::cos(std::numbers::pi / chain.n_sites); }

double bogoliubov_angle(double k, double g) { return std::atan2(-std::sin(k), std::cos(k) - g); }

double epsilon(double g, double g_c) {
    if (g_c == 0.0) fail(ErrorCode::zero_critical_point, "g_c must be nonzero");
    return (g - g_c) / g_c;
}

} // namespace qecho
