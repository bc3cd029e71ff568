#include "sqz/squeezer_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "sqz/errors.hpp"

namespace sqz {

SqueezerSpec SqueezerSpec::from_modes(std::vector<double> r) {
    if (r.empty()) throw domain_error("SqueezerSpec: empty mode list");
    for (double v : r)
        if (!(v >= 0.0)) throw domain_error("SqueezerSpec: squeezing parameters must be >= 0");
    SqueezerSpec s;
    s.r_list = std::move(r);
    return s;
}

SqueezerSpec SqueezerSpec::from_thermal(double mu, double B, int K_max) {
    if (!(B > 0.0)) throw domain_error("SqueezerSpec: gain B must be positive");
    SqueezerSpec s;
    s.thermal = true;
    s.mu = mu;
    s.B = B;
    s.K_max = K_max;
    s.r_list = thermal_weights(mu, K_max);
    for (double& r : s.r_list) r *= B;
    return s;
}

std::vector<double> thermal_weights(double mu, int K_max) {
    if (!(mu >= 0.0 && mu < 1.0))
        throw domain_error("thermal_weights: mu must lie in [0, 1)");
    if (K_max < 0) throw domain_error("thermal_weights: K_max must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(K_max) + 1);
    const double head = std::sqrt(1.0 - mu * mu);
    double m = 1.0;
    for (auto& v : w) {
        v = head * m;
        m *= mu;
    }
    return w;
}

PhotonDistribution single_mode_distribution(double r, int cutoff) {
    if (!(r >= 0.0)) throw domain_error("single_mode_distribution: r must be >= 0");
    if (cutoff < 2 || cutoff % 2 != 0)
        throw domain_error("single_mode_distribution: cutoff must be a positive even integer");
    const double needed = 10.0 * std::max(1.0, r * r);
    if (cutoff < needed)
        throw domain_error("single_mode_distribution: cutoff too small for requested squeezing");

    PhotonDistribution d;
    d.probs.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
    d.sigmas.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
    // ratio p_{2n+2}/p_{2n} = tanh^2(r) (2n+1)/(2n+2)
    const double t2 = std::tanh(r) * std::tanh(r);
    double p = 1.0 / std::cosh(r);
    for (int n = 0; 2 * n <= cutoff; ++n) {
        d.probs[static_cast<std::size_t>(2 * n)] = p;
        p *= t2 * (2.0 * n + 1.0) / (2.0 * n + 2.0);
    }
    return d;
}

PhotonDistribution multimode_distribution(const SqueezerSpec& spec, int cutoff) {
    if (cutoff < 2) throw domain_error("multimode_distribution: cutoff must be >= 2");
    const int even_cut = cutoff + (cutoff % 2);
    std::vector<double> acc(static_cast<std::size_t>(cutoff) + 1, 0.0);
    acc[0] = 1.0;  // vacuum
    std::vector<double> next(acc.size());
    for (double r : spec.r_list) {
        if (r == 0.0) continue;
        int mode_cut = std::max(even_cut,
                                2 * static_cast<int>(std::ceil(5.0 * std::max(1.0, r * r))));
        const auto one = single_mode_distribution(r, mode_cut);
        std::fill(next.begin(), next.end(), 0.0);
        for (int n = 0; n <= cutoff; ++n) {
            const double a = acc[static_cast<std::size_t>(n)];
            if (a == 0.0) continue;
            for (int m = 0; n + m <= cutoff; m += 2)
                next[static_cast<std::size_t>(n + m)] += a * one.probs[static_cast<std::size_t>(m)];
        }
        acc.swap(next);
    }
    PhotonDistribution d;
    d.probs = std::move(acc);
    d.sigmas.assign(d.probs.size(), 0.0);
    return d;
}

double mean_photon_total(const SqueezerSpec& spec) {
    double s = 0.0;
    for (double r : spec.r_list) {
        const double sh = std::sinh(r);
        s += sh * sh;
    }
    return s;
}

GPair g_multi_exact(const SqueezerSpec& spec) {
    double s2 = 0.0, s4 = 0.0, s6 = 0.0;
    for (double r : spec.r_list) {
        const double sh2 = std::sinh(r) * std::sinh(r);
        s2 += sh2;
        s4 += sh2 * sh2;
        s6 += sh2 * sh2 * sh2;
    }
    if (!(s2 > 0.0)) throw domain_error("g_multi_exact: all modes unsqueezed");
    GPair g;
    g.g2 = 1.0 + 2.0 * s4 / (s2 * s2) + 1.0 / s2;
    g.g3 = 1.0 + 6.0 * s4 / (s2 * s2) + 8.0 * s6 / (s2 * s2 * s2)
         + 3.0 / s2 + 6.0 * s4 / (s2 * s2 * s2);
    return g;
}

GPair g_multi_approx(double mu, double B) {
    if (!(B > 0.0)) throw domain_error("g_multi_approx: B must be positive");
    const ThermalShape t = thermal_shape_functions(mu);
    GPair g;
    g.g2 = 1.0 + 2.0 * t.L4 + 1.0 / (B * B);
    g.g3 = 1.0 + 6.0 * t.L4 + 8.0 * t.L6 + (3.0 + 6.0 * t.L4) / (B * B);
    return g;
}

ThermalShape thermal_shape_functions(double mu) {
    if (!(mu >= 0.0 && mu < 1.0))
        throw domain_error("thermal_shape_functions: mu must lie in [0, 1)");
    const double m2 = mu * mu;
    ThermalShape t;
    t.L4 = (1.0 - m2) / (1.0 + m2);
    t.L6 = (1.0 - m2) * (1.0 - m2) / (1.0 + m2 + m2 * m2);
    t.S = 3.0 + 6.0 * t.L4;
    t.K = 1.0 / t.L4;
    return t;
}

GPair single_mode_reference(double mean_n) {
    if (!(mean_n > 0.0)) throw domain_error("single_mode_reference: mean must be positive");
    return {3.0 + 1.0 / mean_n, 15.0 + 9.0 / mean_n};
}

}  // namespace sqz
