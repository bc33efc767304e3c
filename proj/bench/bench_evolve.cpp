// Wall-clock comparison of the serial and OpenMP chain kernels on one echo.
#include "qecho/dynamics.hpp"
#include "qecho/observables.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

int main(int argc, char** argv) {
    const double tau_q = argc > 1 ? std::atof(argv[1]) : 35.0;
    const int n_sites = argc > 2 ? std::atoi(argv[2]) : 50;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

    const qecho::Chain chain{n_sites, 1.0, 1.0};
    const qecho::Schedule s = qecho::echo(qecho::linear(10.0, 0.0, tau_q));
    qecho::IntegratorConfig cfg;
    cfg.sample_count = 2;

    using clock = std::chrono::steady_clock;
    double serial_best = 1e300, parallel_best = 1e300, f_serial = 0, f_parallel = 0;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = clock::now();
        f_serial = qecho::evolve_chain_serial(chain, s, cfg).final_p_gs();
        auto t1 = clock::now();
        f_parallel = qecho::evolve_chain(chain, s, cfg).final_p_gs();
        auto t2 = clock::now();
        serial_best = std::min(serial_best, std::chrono::duration<double>(t1 - t0).count());
        parallel_best = std::min(parallel_best, std::chrono::duration<double>(t2 - t1).count());
    }
    std::printf("N=%d tau_q=%g threads=%d\n", n_sites, tau_q, omp_get_max_threads());
    std::printf("serial   %.4f s  F=%.17g\n", serial_best, f_serial);
    std::printf("parallel %.4f s  F=%.17g\n", parallel_best, f_parallel);
    std::printf("speedup  %.2fx  identical=%s\n", serial_best / parallel_best, f_serial == f_parallel ? "yes" : "no");
    return f_serial == f_parallel ? 0 : 1;
}
