#pragma once

#include <vector>

#include "sqz/fock_stats.hpp"

namespace sqz {

// A set of independent squeezed-vacuum modes, either as explicit per-mode
// squeezing parameters or in the thermal-ladder form r_k = B * lambda_k with
// lambda_k = sqrt(1 - mu^2) mu^k for k = 0..K_max.
struct SqueezerSpec {
    std::vector<double> r_list;  // always populated; expanded for thermal form
    bool thermal = false;
    double mu = 0.0;
    double B = 0.0;
    int K_max = 0;

    static SqueezerSpec from_modes(std::vector<double> r);
    static SqueezerSpec from_thermal(double mu, double B, int K_max);
};

// Geometric mode-weight ladder lambda_k = sqrt(1 - mu^2) mu^k, k = 0..K_max.
// The squared weights sum to 1 - mu^(2 K_max + 2).
std::vector<double> thermal_weights(double mu, int K_max);

// Photon-number distribution of one squeezed-vacuum mode: even bins only,
// p_{2n} = (2n)! / (2^{2n} (n!)^2) * tanh(r)^{2n} / cosh(r).  The cutoff must
// be even and generous enough for the requested squeezing.
PhotonDistribution single_mode_distribution(double r, int cutoff);

// Convolution of the per-mode distributions, truncated at the cutoff.
PhotonDistribution multimode_distribution(const SqueezerSpec& spec, int cutoff);

// Total mean photon number, sum of sinh^2(r_k).
double mean_photon_total(const SqueezerSpec& spec);

struct GPair {
    double g2 = 0.0;
    double g3 = 0.0;
};

// Exact lossless multimode correlations from the sinh-power sums
// s2 = sum sinh^2 r_k, s4 = sum sinh^4 r_k, s6 = sum sinh^6 r_k:
//   g2 = 1 + 2 s4/s2^2 + 1/s2
//   g3 = 1 + 6 s4/s2^2 + 8 s6/s2^3 + 3/s2 + 6 s4/s2^3
GPair g_multi_exact(const SqueezerSpec& spec);

// Weak-pump thermal-ladder approximation in terms of the shape sums
// L4 = (1-mu^2)/(1+mu^2) and L6 = (1-mu^2)^2/(1+mu^2+mu^4):
//   g2 = 1 + 2 L4 + 1/B^2
//   g3 = 1 + 6 L4 + 8 L6 + (3 + 6 L4)/B^2
GPair g_multi_approx(double mu, double B);

struct ThermalShape {
    double L4 = 0.0;
    double L6 = 0.0;
    double S = 0.0;  // slope of g3 against g2 as the pump is varied: 3 + 6 L4
    double K = 0.0;  // effective mode number 1/L4
};

ThermalShape thermal_shape_functions(double mu);

// Single-mode squeezed-vacuum reference values g2 = 3 + 1/<n>, g3 = 15 + 9/<n>.
GPair single_mode_reference(double mean_n);

}  // namespace sqz
