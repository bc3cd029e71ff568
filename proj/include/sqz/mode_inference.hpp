#pragma once

#include <string>
#include <vector>

#include "sqz/fock_stats.hpp"

namespace sqz {

// One pump setting: measured correlation pair with uncertainties.
struct CorrelationPoint {
    double g2 = 0.0;
    double sigma_g2 = 0.0;
    double g3 = 0.0;
    double sigma_g3 = 0.0;
    std::string label;
};

struct SlopeFit {
    double S = 0.0;
    double sigma_S = 0.0;  // NaN when the fit has no degrees of freedom
    double intercept = 0.0;
};

// Weighted linear least squares of g3 against g2 (weights 1/sigma_g3^2; the
// g2 abscissa is treated as exact).  Falls back to a unit-weight fit with
// residual-scaled errors when any sigma_g3 is unusable.
SlopeFit fit_slope(const std::vector<CorrelationPoint>& points);

// Closed-form inversion of the pump-variation slope S = 3 + 6 (1-mu^2)/(1+mu^2)
// for the mode-ladder decay mu, with first-order error transport.
ValueWithSigma invert_slope_to_mu(double S, double sigma_S);

// Gain from a measured g2 at known mu: B = 1/sqrt(g2 - 1 - 2 L4(mu)).
double solve_B(double g2, double mu);

struct ModeReconstruction {
    double S = 0.0;
    double sigma_S = 0.0;
    double mu = 0.0;
    double sigma_mu = 0.0;
    double K = 0.0;       // effective mode number 1/L4(mu)
    double K_low = 0.0;   // at mu - sigma_mu
    double K_high = 0.0;  // at mu + sigma_mu (infinite if mu + sigma_mu >= 1)
    std::vector<std::string> labels;
    std::vector<double> B_per_point;
    std::vector<double> lambda;                 // ladder weights lambda_k
    std::vector<std::vector<double>> r_matrix;  // r_k = B_i lambda_k per point
};

// Full inference chain: slope fit -> mu -> per-point gains -> mode ladder.
ModeReconstruction reconstruct_modes(const std::vector<CorrelationPoint>& points,
                                     int K_max = 40);

}  // namespace sqz
