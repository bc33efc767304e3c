#include "qecho/analytic.hpp"

#include "qecho/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qecho {

namespace {

using cplx = std::complex<double>;

constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coeff = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

cplx gamma_right_half(cplx z) {
    z -= 1.0;
    cplx x = lanczos_coeff[0];
    for (std::size_t i = 1; i < lanczos_coeff.size(); ++i) x += lanczos_coeff[i] / (z + static_cast<double>(i));
    const cplx t = z + lanczos_g + 0.5;
    // exp of the log form keeps |Im z| ~ 50 away from overflow in pow().
    return std::sqrt(2.0 * std::numbers::pi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}

double log_phase_arg(double tau_q, double d) {
    // tau_q * 4 * d^2 inside ln sqrt(.)
    return 0.5 * std::log(4.0 * tau_q * d * d);
}

} // namespace

cplx complex_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        fail(ErrorCode::pole, "Gamma has a pole at nonpositive integers");
    if (z.real() < 0.5) {
        const double pi = std::numbers::pi;
        return pi / (std::sin(pi * z) * gamma_right_half(1.0 - z));
    }
    return gamma_right_half(z);
}

LzAmplitudes lz_asymptotic(double k, double g, double tau_q) {
    if (!(tau_q > 0.0)) fail(ErrorCode::nonpositive_rate, "tau_q must be positive");
    const double pi = std::numbers::pi;
    const double s2 = std::sin(k) * std::sin(k);
    const double x = tau_q * s2;
    const double d = std::cos(k) - g;
    LzAmplitudes out;
    out.valid = 4.0 * tau_q * d * d >= 10.0;
    double psi = tau_q * d * d;
    if (d != 0.0) psi += tau_q * s2 * log_phase_arg(tau_q, d);
    out.u = std::exp(-pi * x) * std::polar(1.0, psi);
    out.v = std::sqrt(2.0 * pi * x) / complex_gamma(cplx(1.0, -x)) * std::exp(-0.5 * pi * x) * std::polar(1.0, -psi);
    return out;
}

double intermediate_phase(double k, double tau_q, double g_t, PhaseConvention conv) {
    const double d = std::cos(k) - g_t;
    double phi = 2.0 * tau_q * (d * d + std::sin(k) * std::sin(k) * log_phase_arg(tau_q, d));
    if (conv == PhaseConvention::stokes) phi += 0.25 * std::numbers::pi;
    return phi;
}

double intermediate_mode_factor(double k, double tau_q, double g_t, PhaseConvention conv) {
    const double pi = std::numbers::pi;
    const double x = tau_q * std::sin(k) * std::sin(k);
    const double phi = intermediate_phase(k, tau_q, g_t, conv);
    const cplx gm = complex_gamma(cplx(1.0, -x));
    const cplx first = std::exp(-2.0 * pi * x) * std::polar(1.0, phi);
    const cplx second = 2.0 * pi * x / (gm * gm) * std::exp(-pi * x) * std::polar(1.0, -phi);
    return std::norm(first + second);
}

IntermediateFidelity fidelity_intermediate(const Chain& chain, double tau_q, double g_t, ModeRange range,
                                           PhaseConvention conv) {
    chain.validate();
    if (!(tau_q > 0.0)) fail(ErrorCode::nonpositive_rate, "tau_q must be positive");
    if (!(std::abs(g_t) < 1.0)) fail(ErrorCode::invalid_turnaround, "need |g_T| < 1");
    IntermediateFidelity out;
    for (const auto& wv : wave_vectors(chain)) {
        if (range == ModeRange::up_to_half_pi && wv.k > 0.5 * std::numbers::pi + 1e-12) continue;
        if (std::abs(std::cos(wv.k) - g_t) < 1e-12) {
            ++out.modes_excluded;
            continue;
        }
        out.fidelity *= intermediate_mode_factor(wv.k, tau_q, g_t, conv);
        ++out.modes_used;
    }
    return out;
}

double fidelity_free_evolution(const Chain& chain, double g_t, double delta_t) {
    chain.validate();
    if (delta_t < 0.0) fail(ErrorCode::negative_duration, "delta_t must be >= 0");
    double f = 1.0;
    for (const auto& wv : wave_vectors(chain)) {
        const double s = std::sin(wv.k);
        const double osc = std::sin(mode_energy(wv, g_t, chain.coupling_j) * delta_t);
        f *= 1.0 - s * s * osc * osc / (1.0 - 2.0 * g_t * std::cos(wv.k) + g_t * g_t);
    }
    return f;
}

double freezeout_time(double tau_q, double z, double nu) {
    if (!(tau_q > 0.0)) fail(ErrorCode::nonpositive_rate, "tau_q must be positive");
    const double zn = z * nu;
    if (!(zn > 0.0)) fail(ErrorCode::invalid_argument, "z * nu must be positive");
    return std::pow(tau_q, zn / (1.0 + zn));
}

} // namespace qecho
