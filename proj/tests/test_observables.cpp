#include "qecho/error.hpp"
#include "qecho/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace qecho;
using C = std::complex<double>;

namespace {

std::vector<ModeState> uniform_states(int count, double ground_pop) {
    const double b = std::sqrt(ground_pop), a = std::sqrt(1.0 - ground_pop);
    return std::vector<ModeState>(count, ModeState{C(a, 0), C(b, 0)});
}

std::vector<ModeState> random_states(int count, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0), ph(-3.14159, 3.14159);
    std::vector<ModeState> out;
    for (int i = 0; i < count; ++i) {
        const double p = u(rng);
        out.push_back({std::polar(std::sqrt(1 - p), ph(rng)), std::polar(std::sqrt(p), ph(rng))});
    }
    return out;
}

} // namespace

TEST_CASE("ground-state probability") {
    CHECK(p_ground(uniform_states(25, 1.0)) == 1.0);
    auto one_out = uniform_states(25, 1.0);
    one_out[7] = {C(1, 0), C(0, 0)};
    CHECK(p_ground(one_out) == 0.0);
    CHECK(p_ground(uniform_states(25, 0.99)) == doctest::Approx(std::pow(0.99, 25)).epsilon(1e-14));
    CHECK(std::pow(0.99, 25) == doctest::Approx(0.7778).epsilon(1e-4));
}

TEST_CASE("magnetization and kink density limits") {
    CHECK(magnetization(uniform_states(25, 1.0), 50) == doctest::Approx(1.0));
    CHECK(magnetization(uniform_states(25, 0.0), 50) == doctest::Approx(-1.0));
    CHECK(magnetization(uniform_states(25, 0.5), 50) == doctest::Approx(0.0).scale(1));
    CHECK(kink_density(uniform_states(25, 1.0), 50) == 0.0);
    CHECK(kink_density(uniform_states(25, 0.0), 50) == doctest::Approx(1.0));
    auto single = uniform_states(25, 1.0);
    single[3] = {C(1, 0), C(0, 0)};
    CHECK(kink_density(single, 50) == doctest::Approx(0.04));
    CHECK_THROWS_AS(magnetization(uniform_states(24, 1.0), 50), Error);
    CHECK_THROWS_AS(kink_density(uniform_states(26, 1.0), 50), Error);
}

TEST_CASE("residual energy") {
    const Chain c{50, 1.0, 1.0};
    const auto ks = wave_vectors(c);
    const double g = 0.7;
    CHECK(residual_energy(uniform_states(25, 1.0), ks, g, 1.0) == 0.0);
    auto one = uniform_states(25, 1.0);
    one[4] = {C(0, 1), C(0, 0)};
    CHECK(residual_energy(one, ks, g, 1.0) == doctest::Approx(4.0 * mode_energy(ks[4], g, 1.0)));
    const double p = 0.3;
    double sum = 0.0;
    for (const auto& w : ks) sum += mode_energy(w, g, 1.0);
    CHECK(residual_energy(uniform_states(25, 1.0 - p), ks, g, 1.0) == doctest::Approx(4.0 * p * sum).epsilon(1e-12));
    CHECK_THROWS_AS(residual_energy(uniform_states(3, 1.0), ks, g, 1.0), Error);
}

TEST_CASE("observable properties on random states") {
    std::mt19937 rng(3);
    const Chain c{50, 1.0, 1.0};
    const auto ks = wave_vectors(c);
    for (int trial = 0; trial < 200; ++trial) {
        const auto st = random_states(25, rng);
        const ObservableSet o = observe(st, c, 0.4);
        double smallest = 1.0;
        for (const auto& s : st) smallest = std::min(smallest, s.ground_population());
        CHECK(o.p_gs <= smallest);
        CHECK(o.p_gs >= 0.0);
        CHECK(o.fidelity == o.p_gs);
        CHECK(o.magnetization >= -1.0);
        CHECK(o.magnetization <= 1.0);
        CHECK(o.kink_density >= 0.0);
        CHECK(o.kink_density <= 1.0);
        CHECK(o.residual_energy > 0.0);
        CHECK(o.kink_density == doctest::Approx((1.0 - o.magnetization) / 2.0).epsilon(1e-13));

        // Moduli only: rotating phases changes nothing.
        auto rotated = st;
        for (auto& s : rotated) {
            s.alpha *= std::polar(1.0, 0.9);
            s.beta *= std::polar(1.0, -2.1);
        }
        const ObservableSet r = observe(rotated, c, 0.4);
        CHECK(r.magnetization == doctest::Approx(o.magnetization).epsilon(1e-14));
        CHECK(r.kink_density == doctest::Approx(o.kink_density).epsilon(1e-14));
    }
}
