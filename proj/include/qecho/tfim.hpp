#pragma once

// Static spectral data of the transverse-field Ising chain in the
// momentum-space (free-fermion) description. hbar = 1 throughout.

#include <vector>

namespace qecho {

struct Chain {
    int n_sites = 50;
    double coupling_j = 1.0;
    double g_critical = 1.0;

    // Throws invalid-chain unless n_sites is even and >= 2 and J > 0.
    void validate() const;
    int mode_count() const { return n_sites / 2; }
};

// k = (2s+1) pi / N for s = 0 .. N/2-1.
struct WaveVector {
    double k = 0.0;
    int index = 0;
};

std::vector<WaveVector> wave_vectors(const Chain& chain);

// Lambda_k(g) = J sqrt(g^2 - 2 g cos k + 1).
double mode_energy(double k, double g, double j);
inline double mode_energy(const WaveVector& wv, double g, double j) { return mode_energy(wv.k, g, j); }

// Delta(g) = 2 J sqrt(1 - 2 g cos(pi/N) + g^2), minimal at g = cos(pi/N).
double gap(const Chain& chain, double g);
double gap_slope(const Chain& chain, double g); // dDelta/dg
double min_gap(const Chain& chain);             // 2 J sin(pi/N)
double min_gap_location(const Chain& chain);    // cos(pi/N)

// theta_k = atan2(-sin k, cos k - g), in (-pi, pi].
double bogoliubov_angle(double k, double g);

// eps = (g - g_c) / g_c; throws zero-critical-point when g_c == 0.
double epsilon(double g, double g_c);

} // namespace qecho
