#pragma once

// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with FSAL and
// max-norm error control. The independent variable may run backwards.

#include "qecho/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace qecho {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct StepControl {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.0;        // |h| cap, 0 = none
    double min_step_fraction = 1e-14; // of the span; below this the step underflows
    long max_steps = 50'000'000;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
};

namespace detail {

// Butcher tableau, Dormand & Prince (1980).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace detail

// Advances y from x0 to x1. `h` carries the step size between calls
// (0 lets the routine pick one); its sign is ignored.
template <std::size_t N, class Rhs>
OdeState<N> dormand_prince(Rhs&& rhs, double x0, double x1, OdeState<N> y, const StepControl& ctl, double& h,
                           StepStats* stats = nullptr) {
    using namespace detail;
    const double span = x1 - x0;
    if (span == 0.0) return y;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const double length = std::abs(span);
    const double h_min = ctl.min_step_fraction * length;
    double h_max = length;
    if (ctl.max_step > 0.0) h_max = std::min(h_max, ctl.max_step);

    double step = std::abs(h);
    if (!(step > 0.0)) step = std::min(h_max, length * 1e-3);
    step = std::min(step, h_max);

    OdeState<N> k1 = rhs(x0, y), k2, k3, k4, k5, k6, k7, tmp, y_new;
    double x = x0;
    long taken = 0;
    double proposal = step;

    while (dir * (x1 - x) > 0.0) {
        if (++taken > ctl.max_steps)
            fail(ErrorCode::tolerance_not_met, "step budget exhausted after " + std::to_string(ctl.max_steps) + " steps");
        bool last = false;
        proposal = step;
        if (step >= std::abs(x1 - x)) {
            step = std::abs(x1 - x);
            last = true;
        }
        const double hs = dir * step;

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
        k2 = rhs(x + c2 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(x + c3 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(x + c4 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(x + c5 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double x_next = last ? x1 : x + hs;
        k6 = rhs(x + hs, tmp);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(x_next, y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / scale);
        }

        if (!std::isfinite(err)) err = 1e10;
        if (err <= 1.0) {
            x = x_next;
            y = y_new;
            k1 = k7;
            if (stats) ++stats->accepted;
            const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
            step = std::min(h_max, step * grow);
            if (last) {
                proposal = std::max(proposal, step);
                break;
            }
        } else {
            if (stats) ++stats->rejected;
            step *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (step < h_min)
                fail(ErrorCode::step_underflow, "step size collapsed below " + std::to_string(h_min));
        }
    }
    h = proposal;
    return y;
}

} // namespace qecho
