#include "qecho/adiabaticity.hpp"
#include "qecho/analytic.hpp"
#include "qecho/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qecho;

namespace {

IntegratorConfig quick() {
    IntegratorConfig cfg;
    cfg.sample_count = 2;
    return cfg;
}

double echo_fidelity(const Chain& c, double g0, double gt, double tau, double delay) {
    return echo_test(c, linear(g0, gt, tau), delay, 0.5, quick()).fidelity;
}

} // namespace

TEST_CASE("regime labels for the three reference quenches") {
    const Chain c{50, 1.0, 1.0};
    CHECK(classify_regime(c, 150, 10, 0) == Regime::adiabatic);
    CHECK(classify_regime(c, 35, 10, 0) == Regime::intermediate);
    CHECK(classify_regime(c, 0.004, 10, 0) == Regime::impulse);
    CHECK_THROWS_AS(classify_regime(c, 0, 10, 0), Error);
}

TEST_CASE("regime labels never reverse along tau") {
    for (int n : {10, 50, 200}) {
        const Chain c{n, 1.0, 1.0};
        int last = 0; // 0 impulse, 1 intermediate, 2 adiabatic
        for (double tau = 1e-5; tau < 1e6; tau *= 1.07) {
            const Regime r = classify_regime(c, tau, 10, 0);
            const int rank = r == Regime::impulse ? 0 : r == Regime::intermediate ? 1 : 2;
            CHECK(rank >= last);
            last = rank;
        }
        CHECK(last == 2);
    }
    // Thresholds are configuration.
    const Chain c{50, 1.0, 1.0};
    CHECK(classify_regime(c, 150, 10, 0, {10.0, 1.0}) == Regime::intermediate);
}

TEST_CASE("echo test verdict follows the threshold") {
    const Chain c{20, 1.0, 1.0};
    const Schedule f = linear(3, 0, 2);
    const EchoReport r = echo_test(c, f, 0.0, 0.999, quick());
    CHECK(r.threshold == 0.999);
    CHECK((r.verdict == Verdict::adiabatic) == (r.fidelity >= 0.999));
    const EchoReport lo = echo_test(c, f, 0.0, r.fidelity, quick());
    CHECK(lo.verdict == Verdict::adiabatic);
    const EchoReport hi = echo_test(c, f, 0.0, std::min(1.0, r.fidelity + 1e-9), quick());
    CHECK(hi.verdict == (r.fidelity + 1e-9 >= 1.0 ? Verdict::adiabatic : Verdict::not_adiabatic));
    CHECK(r.observables.fidelity == r.fidelity);
    CHECK(r.regime_hint != Regime::unknown);
    CHECK_THROWS_AS(echo_test(c, f, 0.0, 0.0, quick()), Error);
    CHECK_THROWS_AS(echo_test(c, f, 0.0, 1.5, quick()), Error);
    CHECK_THROWS_AS(echo_test(c, f, -1.0, 0.9, quick()), Error);
    // No hint for anything but a single linear ramp.
    CHECK(echo_test(c, concat(f, hold(0, 1)), 0.0, 0.9, quick()).regime_hint == Regime::unknown);
}

TEST_CASE("delayed echo schedule layout") {
    const Schedule f = linear(10, 0, 1);
    const Schedule e = echo_with_delay(f, 0.7);
    CHECK(e.total_duration() == doctest::Approx(20.7));
    CHECK(e.value(10.35) == 0.0);
    CHECK(e.end_value() == doctest::Approx(10));
    CHECK(echo_with_delay(f, 0.0).total_duration() == doctest::Approx(20));
}

TEST_CASE("sudden echo reproduces the closed-form free-evolution fidelity") {
    const Chain c{50, 1.0, 1.0};
    CHECK(echo_fidelity(c, 10, 0, 1e-6, 0.0) > 0.9999);
    for (double dt : {0.1, 0.3, 0.7})
        CHECK(echo_fidelity(c, 10, 0, 1e-6, dt) == doctest::Approx(fidelity_free_evolution(c, 0.0, dt)).epsilon(2e-3).scale(1));
}

TEST_CASE("delayed echo separates impulse from adiabatic quenches") {
    const Chain c{50, 1.0, 1.0};
    const EchoReport imp = echo_test(c, linear(10, 0, 0.004), 0.7, 0.999, quick());
    CHECK(imp.verdict == Verdict::not_adiabatic);
    CHECK(imp.fidelity < 0.01);
    CHECK(imp.regime_hint == Regime::impulse);
    CHECK(imp.delay_used == 0.7);
    // Well inside the adiabatic regime the hold only contributes a global phase.
    const double f0 = echo_fidelity(c, 10, 0, 1000, 0.0);
    CHECK(f0 > 0.999);
    for (double dt : {0.7, 10.0, 40.0}) CHECK(std::abs(echo_fidelity(c, 10, 0, 1000, dt) - f0) <= 0.01);
}

TEST_CASE("sweep rows follow the grid") {
    const Chain c{20, 1.0, 1.0};
    const auto grid = geometric_grid(0.01, 10, 7);
    const SweepTable t = sweep_tau(c, grid, 0.2, 4, 0, quick());
    REQUIRE(t.size() == 7);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t[i].tau_q == grid[i]);
        CHECK(t[i].fidelity == echo_fidelity(c, 4, 0, grid[i], 0.2));
        CHECK(t[i].kink_density == doctest::Approx((1 - t[i].magnetization) / 2).epsilon(1e-10));
    }
    const std::vector<double> single = {3.0};
    CHECK(sweep_tau(c, single, 0, 4, 0, quick()).size() == 1);
    const std::vector<double> unsorted = {1.0, 0.5};
    CHECK_THROWS_AS(sweep_tau(c, unsorted, 0, 4, 0, quick()), Error);
    const std::vector<double> empty;
    CHECK_THROWS_AS(sweep_tau(c, empty, 0, 4, 0, quick()), Error);
}

TEST_CASE("grids") {
    const auto g = geometric_grid(1e-3, 1e3, 7);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 1e3);
    CHECK(g[3] == doctest::Approx(1.0));
    const auto u = uniform_grid(5, 40, 36);
    CHECK(u[1] == doctest::Approx(6));
    CHECK(u.back() == 40);
}

TEST_CASE("minimal adiabatic tau") {
    const Chain c{20, 1.0, 1.0};
    SearchOptions opts;
    opts.floor = 0.5;
    opts.ceiling = 2000;
    const MinTauResult r = min_adiabatic_tau(c, 4, 0, 0.9, 0.0, quick(), opts);
    CHECK_FALSE(r.at_floor);
    CHECK(r.fidelity >= 0.9);
    CHECK(echo_fidelity(c, 4, 0, r.tau_c, 0.0) >= 0.9);
    CHECK(echo_fidelity(c, 4, 0, 2 * r.tau_c, 0.0) >= 0.9);
    // Reproducible.
    CHECK(min_adiabatic_tau(c, 4, 0, 0.9, 0.0, quick(), opts).tau_c == r.tau_c);
    // Just below the answer the echo fails somewhere within one grid ratio.
    CHECK(echo_fidelity(c, 4, 0, r.tau_c / 1.011, 0.0) < 0.9);

    const MinTauResult vacuous = min_adiabatic_tau(c, 4, 0, 1e-12, 0.0, quick(), opts);
    CHECK(vacuous.at_floor);
    CHECK(vacuous.tau_c == opts.floor);

    opts.ceiling = 0.8;
    try {
        min_adiabatic_tau(c, 4, 0, 0.99, 0.0, quick(), opts);
        FAIL("expected no-bracket");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_bracket);
    }
    CHECK_THROWS_AS(min_adiabatic_tau(c, 4, 0, 1.0, 0.0, quick()), Error);
}

TEST_CASE("segmented protocol") {
    const Chain c{20, 1.0, 1.0};
    SearchOptions opts;
    opts.floor = 0.05;
    opts.ceiling = 5000;
    const SegmentedProtocol one = segmented_protocol(c, 4, 0, 1, 0.9, 0.0, quick(), opts);
    CHECK(one.tau_c[0] == min_adiabatic_tau(c, 4, 0, 0.9, 0.0, quick(), opts).tau_c);
    CHECK(one.total_duration == doctest::Approx(4 * one.tau_c[0]));

    const SegmentedProtocol four = segmented_protocol(c, 4, 0, 4, 0.9, 0.0, quick(), opts);
    REQUIRE(four.tau_c.size() == 4);
    CHECK(four.edges.front() == 4);
    CHECK(four.edges.back() == 0);
    // Sub-interval [1, 0] holds the gap minimum at cos(pi/20).
    const auto worst = std::max_element(four.tau_c.begin(), four.tau_c.end()) - four.tau_c.begin();
    CHECK(worst == 3);
    CHECK(four.rates[0] == doctest::Approx(1 / four.tau_c[0]));
    double max_tau = 0.0;
    for (double t : four.tau_c) max_tau = std::max(max_tau, t);
    CHECK(four.total_duration <= 4 * 1.0 * max_tau);
    CHECK(four.total_duration < one.total_duration);
    CHECK(four.forward.start_value() == 4);
    CHECK(four.forward.end_value() == doctest::Approx(0).scale(1));
    CHECK_THROWS_AS(segmented_protocol(c, 4, 0, 0, 0.9, 0.0, quick(), opts), Error);
}

TEST_CASE("shared-clock KZM and RC pair") {
    const Chain c{50, 0.5, 1.0};
    const UniformPair p = uniform_pair(c, 2.0, 1.0 / 3.0);
    const double s = std::sin(std::numbers::pi / 50);
    CHECK(p.gamma_prime == doctest::Approx(4 / std::numbers::pi));
    CHECK(p.t_begin == doctest::Approx(-std::min(2.0 / (2 * 0.5 * s), p.t_end) / 3));
    CHECK(p.t_end == doctest::Approx(p.gamma_prime * 50 / 2));
    CHECK(p.kzm.total_duration() == doctest::Approx(p.rc.total_duration()));
    CHECK(p.kzm.value(-p.t_begin) == doctest::Approx(std::cos(std::numbers::pi / 50)));
    CHECK(p.kzm.start_value() < p.rc.start_value());
    CHECK(std::isfinite(p.rc.end_value()));
    CHECK(p.kzm.end_value() > p.rc.end_value());
}
