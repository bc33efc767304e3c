#include "qecho/observables.hpp"

#include "qecho/error.hpp"

#include <string>

namespace qecho {

namespace {

void check_count(std::size_t got, int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0 || got != static_cast<std::size_t>(n_sites / 2))
        fail(ErrorCode::count_mismatch,
             "expected N/2 = " + std::to_string(n_sites / 2) + " mode states, got " + std::to_string(got));
}

} // namespace

double p_ground(std::span<const ModeState> states) {
    double p = 1.0;
    for (const auto& st : states) p *= st.ground_population();
    return p;
}

double magnetization(std::span<const ModeState> states, int n_sites) {
    check_count(states.size(), n_sites);
    double sum = 0.0;
    for (const auto& st : states) sum += 2.0 * st.ground_population();
    return 2.0 * sum / n_sites - 1.0;
}

double kink_density(std::span<const ModeState> states, int n_sites) {
    check_count(states.size(), n_sites);
    double sum = 0.0;
    for (const auto& st : states) sum += st.excited_population();
    return 2.0 * sum / n_sites;
}

double residual_energy(std::span<const ModeState> states, std::span<const WaveVector> k_list, double g, double j) {
    if (states.size() != k_list.size())
        fail(ErrorCode::count_mismatch, "states and wave vectors differ in length");
    double e = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        e += 2.0 * 2.0 * mode_energy(k_list[i], g, j) * states[i].excited_population();
    return e;
}

ObservableSet observe(std::span<const ModeState> states, const Chain& chain, double g) {
    const auto ks = wave_vectors(chain);
    ObservableSet out;
    out.p_gs = p_ground(states);
    out.fidelity = out.p_gs;
    out.magnetization = magnetization(states, chain.n_sites);
    out.kink_density = kink_density(states, chain.n_sites);
    out.residual_energy = residual_energy(states, ks, g, chain.coupling_j);
    return out;
}

} // namespace qecho
