#include "qecho/dormand_prince.hpp"
#include "qecho/dynamics.hpp"
#include "qecho/error.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace qecho;

namespace {

using C = std::complex<double>;
using Spinor = std::array<C, 2>;

// Fixed-step RK4 on the mode Hamiltonian written in the fixed (sigma^z)
// basis, H = 2 J [(g - cos k) sz + sin k sx]. Only g(t) enters, never g_dot,
// so this is independent of the adiabatic-frame equations.
Spinor h_apply(double g, const Spinor& y, double k, double j) {
    const double hz = 2 * j * (g - std::cos(k)), hx = 2 * j * std::sin(k);
    const C mi(0, -1);
    return {mi * (hz * y[0] + hx * y[1]), mi * (hx * y[0] - hz * y[1])};
}

Spinor ground_spinor(double g, double k) {
    const double a = g - std::cos(k), s = std::sin(k), lam = std::hypot(a, s);
    const double n = std::hypot(s, a + lam);
    return {C(-s / n), C((a + lam) / n)};
}

Spinor excited_spinor(double g, double k) {
    const double a = g - std::cos(k), s = std::sin(k), lam = std::hypot(a, s);
    const double n = std::hypot(s, a + lam);
    return {C((a + lam) / n), C(s / n)};
}

C overlap(const Spinor& a, const Spinor& b) { return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]; }

// Ramps are stepped in the fixed basis; holds apply exp(-+i Lambda dt) to the
// eigenbasis components, the same hold map the library documents.
double brute_ground_population(double k, double j, const Schedule& s, int steps) {
    Spinor y = ground_spinor(s.start_value(), k);
    for (std::size_t seg = 0; seg < s.segments().size(); ++seg) {
        const Segment& piece = s.segments()[seg];
        const double t0 = s.segment_start(seg), d = piece.duration();
        if (piece.is_hold()) {
            const double g = piece.start_value(), lam = j * std::hypot(g - std::cos(k), std::sin(k));
            const Spinor gs = ground_spinor(g, k), es = excited_spinor(g, k);
            const C cg = overlap(gs, y) * std::polar(1.0, lam * d), ce = overlap(es, y) * std::polar(1.0, -lam * d);
            y = {cg * gs[0] + ce * es[0], cg * gs[1] + ce * es[1]};
            continue;
        }
        const double h = d / steps;
        for (int i = 0; i < steps; ++i) {
            const double t = t0 + i * h;
            const double g1 = s.value(t), g2 = s.value(t + 0.5 * h), g3 = s.value(std::min(t0 + d, t + h));
            auto k1 = h_apply(g1, y, k, j);
            Spinor y2{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
            auto k2 = h_apply(g2, y2, k, j);
            Spinor y3{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
            auto k3 = h_apply(g2, y3, k, j);
            Spinor y4{y[0] + h * k3[0], y[1] + h * k3[1]};
            auto k4 = h_apply(g3, y4, k, j);
            for (int c = 0; c < 2; ++c) y[c] += h / 6 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    return std::norm(overlap(ground_spinor(s.end_value(), k), y));
}

IntegratorConfig final_only() {
    IntegratorConfig cfg;
    cfg.sample_count = 2;
    return cfg;
}

} // namespace

TEST_CASE("Dormand-Prince on a linear test equation") {
    // y' = i w y, exact rotation.
    auto rhs = [](double, const OdeState<2>& y) -> OdeState<2> { return {-3.0 * y[1], 3.0 * y[0]}; };
    StepControl ctl;
    ctl.rel_tol = 1e-11;
    ctl.abs_tol = 1e-13;
    double h = 0.0;
    StepStats st;
    const auto y = dormand_prince<2>(rhs, 0.0, 2.0, {1.0, 0.0}, ctl, h, &st);
    CHECK(y[0] == doctest::Approx(std::cos(6.0)).epsilon(1e-9));
    CHECK(y[1] == doctest::Approx(std::sin(6.0)).epsilon(1e-9));
    CHECK(st.accepted > 0);

    // Backward integration returns to the start.
    double hb = 0.0;
    const auto back = dormand_prince<2>(rhs, 2.0, 0.0, y, ctl, hb);
    CHECK(back[0] == doctest::Approx(1.0).epsilon(1e-9));

    ctl.max_steps = 3;
    double h2 = 0.0;
    try {
        dormand_prince<2>(rhs, 0.0, 200.0, {1.0, 0.0}, ctl, h2);
        FAIL("expected budget failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::tolerance_not_met);
    }
}

TEST_CASE("free evolution phases") {
    const ModeState s{C(0.6, 0.0), C(0.0, 0.8)};
    const double k = 0.4, g = 0.3, j = 1.5, dt = 0.77;
    const ModeState out = free_phase(s, k, g, j, dt);
    const double lam = mode_energy(k, g, j);
    CHECK(out.excited_population() == doctest::Approx(0.36));
    CHECK(out.ground_population() == doctest::Approx(0.64));
    CHECK(std::arg(out.beta / s.beta) == doctest::Approx(std::remainder(lam * dt, 2 * std::numbers::pi)));
    CHECK(std::arg(out.alpha / s.alpha) == doctest::Approx(std::remainder(-lam * dt, 2 * std::numbers::pi)));
}

TEST_CASE("single mode agrees with a fixed-basis brute-force integration") {
    const Chain c{50, 1.0, 1.0};
    const auto ks = wave_vectors(c);
    struct Case {
        int mode;
        Schedule s;
        double j;
    };
    const Chain half{50, 0.5, 1.0};
    const Case cases[] = {
        {0, echo(linear(10, 0, 5)), 1.0},
        {0, echo(linear(10, 0, 12)), 1.0},
        {1, concat(concat(linear(10, 0, 3), hold(0, 0.3)), linear(0, 10, 3)), 1.0},
        {0, kzm_schedule(half, 2.0, 0.5, 3.0), 0.5},
        {2, rc_schedule(half, 1.3, 0.5, 3.0), 0.5},
    };
    for (const auto& cs : cases) {
        const double num = evolve_mode(ks[cs.mode], cs.s, cs.j, final_only()).final_state.ground_population();
        const double ref = brute_ground_population(ks[cs.mode].k, cs.j, cs.s, 100000);
        CHECK(num == doctest::Approx(ref).epsilon(1e-6).scale(1));
    }
}

TEST_CASE("norm conservation") {
    const Chain c{50, 1.0, 1.0};
    const auto ks = wave_vectors(c);
    const Schedule cases[] = {echo(linear(10, 0, 0.004)), echo(linear(10, 0, 35)),
                              concat(concat(linear(10, 0, 1), hold(0, 40)), linear(0, 10, 1)),
                              kzm_schedule(Chain{50, 0.5, 1.0}, 2, 0, 10)};
    for (const auto& s : cases) {
        const auto trace = evolve_chain(c, s, IntegratorConfig{});
        for (const auto& st : trace.final_states) CHECK(std::abs(st.norm() - 1.0) <= 1e-9);
        for (const auto& m : ks) {
            const auto ev = evolve_mode(m, s, 1.0, IntegratorConfig{}, {}, trace_times(s, 11));
            for (const auto& smp : ev.samples) CHECK(std::abs(smp.norm() - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("sudden limit freezes the state") {
    // Overlap of the ground state at g0 with the levels at gT:
    // |<-(gT)|-(g0)>|^2 = cos^2((theta(g0) - theta(gT)) / 2).
    const Chain c{50, 1.0, 1.0};
    const auto ks = wave_vectors(c);
    for (int m : {0, 5, 12, 24}) {
        const auto ev = evolve_mode(ks[m], linear(10, 0, 1e-7), 1.0, final_only());
        const double dth = bogoliubov_angle(ks[m].k, 10) - bogoliubov_angle(ks[m].k, 0);
        CHECK(ev.final_state.ground_population() == doctest::Approx(std::pow(std::cos(dth / 2), 2)).epsilon(1e-5));
    }
}

TEST_CASE("adiabatic limit keeps the ground state") {
    const Chain c{50, 1.0, 1.0};
    const auto ks = wave_vectors(c);
    const auto ev = evolve_mode(ks[3], linear(10, 0, 2000), 1.0, final_only());
    CHECK(ev.final_state.ground_population() > 1.0 - 1e-4);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    const Chain c{50, 1.0, 1.0};
    const Schedule s = echo(linear(10, 0, 20));
    IntegratorConfig cfg;
    cfg.sample_count = 31;
    const auto a = evolve_chain_serial(c, s, cfg);
    const auto b = evolve_chain(c, s, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].t == b.samples[i].t);
        CHECK(a.samples[i].p_gs == b.samples[i].p_gs);
        CHECK(a.samples[i].mode_populations == b.samples[i].mode_populations);
    }
    CHECK(a.total_steps == b.total_steps);
}

TEST_CASE("tolerance refinement changes the fidelity negligibly") {
    const Chain c{50, 1.0, 1.0};
    const Schedule s = echo(linear(10, 0, 35));
    IntegratorConfig coarse = final_only(), fine = final_only();
    fine.rel_tol = coarse.rel_tol / 2;
    fine.abs_tol = coarse.abs_tol / 2;
    CHECK(evolve_chain(c, s, coarse).final_p_gs() == doctest::Approx(evolve_chain(c, s, fine).final_p_gs()).epsilon(1e-6));
    IntegratorConfig capped = final_only();
    capped.max_step = 0.05;
    CHECK(evolve_chain(c, s, coarse).final_p_gs() == doctest::Approx(evolve_chain(c, s, capped).final_p_gs()).epsilon(1e-6));
}

TEST_CASE("trace layout") {
    const Chain c{10, 1.0, 1.0};
    const Schedule s = concat(linear(2, 0, 1), hold(0, 0.5));
    IntegratorConfig cfg;
    cfg.sample_count = 5;
    const auto tr = evolve_chain(c, s, cfg);
    CHECK(tr.samples.front().t == 0);
    CHECK(tr.samples.back().t == doctest::Approx(2.5));
    bool has_break = false;
    for (const auto& smp : tr.samples) {
        CHECK(smp.mode_populations.size() == 5);
        CHECK(smp.g == doctest::Approx(s.value(smp.t)));
        double prod = 1;
        for (double p : smp.mode_populations) prod *= p;
        CHECK(smp.p_gs == doctest::Approx(prod).epsilon(1e-14));
        if (std::abs(smp.t - 2.0) < 1e-12) has_break = true;
    }
    CHECK(has_break);
    CHECK(tr.samples.front().p_gs == 1.0);
}

TEST_CASE("Landau-Zener frame: excitation follows the exponential law") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uk(0.15, 1.4), ux(0.1, 2.0);
    for (int i = 0; i < 10; ++i) {
        const double k = uk(rng), x = ux(rng);
        const double tau = x / std::pow(std::sin(k), 2);
        const WaveVector wv{k, 0};
        // Window wide enough that the asymptotic populations have settled.
        const double half = std::max(30.0, 60.0 / std::sqrt(tau));
        // Windows reach |t'| ~ 10^3, so the default tolerance leaves ~1e-9 of norm drift.
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-10;
        const auto lz = lz_mode_evolve(wv, tau, std::cos(k) - half, std::cos(k) + half, cfg);
        CHECK(lz.adiabatic.excited_population() == doctest::Approx(std::exp(-2 * std::numbers::pi * x)).epsilon(0.01));
        CHECK(std::abs(std::norm(lz.u) + std::norm(lz.v) - 1.0) < 1e-9);
    }
}

TEST_CASE("Landau-Zener frame agrees with the instantaneous-basis equation") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uk(0.05, 3.0), ut(0.05, 20.0);
    for (int i = 0; i < 10; ++i) {
        const WaveVector wv{uk(rng), 0};
        const double tau = ut(rng);
        const auto lz = lz_mode_evolve(wv, tau, -10, 10, IntegratorConfig{});
        const auto ev = evolve_mode(wv, linear(10, -10, tau), 1.0, final_only());
        CHECK(std::abs(lz.adiabatic.ground_population() - ev.final_state.ground_population()) <= 1e-4);
    }
}

TEST_CASE("invalid integrator settings") {
    IntegratorConfig bad;
    bad.rel_tol = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = {};
    bad.max_step = -1;
    CHECK_THROWS_AS(bad.validate(), Error);
}
