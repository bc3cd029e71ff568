#include "sqz/mode_inference.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "sqz/errors.hpp"
#include "sqz/squeezer_model.hpp"

namespace sqz {

SlopeFit fit_slope(const std::vector<CorrelationPoint>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw domain_error("fit_slope: need at least two pump settings");

    bool weighted = true;
    for (const auto& p : points)
        if (!(p.sigma_g3 > 0.0) || !std::isfinite(p.sigma_g3)) weighted = false;

    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double w = weighted ? 1.0 / (p.sigma_g3 * p.sigma_g3) : 1.0;
        sw += w;
        sx += w * p.g2;
        sy += w * p.g3;
        sxx += w * p.g2 * p.g2;
        sxy += w * p.g2 * p.g3;
    }
    const double delta = sw * sxx - sx * sx;
    if (!(delta > 0.0) || delta < 1e-12 * sw * sxx)
        throw domain_error("fit_slope: degenerate abscissa (g2 values coincide)");

    SlopeFit fit;
    fit.S = (sw * sxy - sx * sy) / delta;
    fit.intercept = (sxx * sy - sx * sxy) / delta;

    if (n == 2) {
        fit.sigma_S = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    double var = sw / delta;
    if (!weighted) {
        // Unit weights carry no scale, so normalize by the residual variance.
        double chi2 = 0.0;
        for (const auto& p : points) {
            const double r = p.g3 - (fit.S * p.g2 + fit.intercept);
            chi2 += r * r;
        }
        var *= chi2 / (static_cast<double>(n) - 2.0);
    }
    fit.sigma_S = std::sqrt(var);
    return fit;
}

ValueWithSigma invert_slope_to_mu(double S, double sigma_S) {
    if (!(S > 3.0))
        throw domain_error("invert_slope_to_mu: slope at or below the many-mode floor S = 3");
    if (!(S <= 9.0))
        throw domain_error("invert_slope_to_mu: slope above the single-mode value S = 9");
    const double L4 = (S - 3.0) / 6.0;
    const double mu = std::sqrt((1.0 - L4) / (1.0 + L4));
    // dmu/dS = -1 / (6 mu (1+L4)^2); mu = 0 only at S = 9 exactly.
    ValueWithSigma out;
    out.value = mu;
    if (mu > 0.0 && sigma_S >= 0.0)
        out.sigma = sigma_S / (6.0 * mu * (1.0 + L4) * (1.0 + L4));
    else
        out.sigma = std::numeric_limits<double>::quiet_NaN();
    return out;
}

double solve_B(double g2, double mu) {
    const auto t = thermal_shape_functions(mu);
    const double rad = g2 - 1.0 - 2.0 * t.L4;
    if (!(rad > 0.0))
        throw domain_error("solve_B: g2 too small for the given mu (no real gain)");
    return 1.0 / std::sqrt(rad);
}

ModeReconstruction reconstruct_modes(const std::vector<CorrelationPoint>& points,
                                     int K_max) {
    const auto fit = fit_slope(points);
    const auto mu = invert_slope_to_mu(fit.S, std::isnan(fit.sigma_S) ? 0.0 : fit.sigma_S);

    ModeReconstruction rec;
    rec.S = fit.S;
    rec.sigma_S = fit.sigma_S;
    rec.mu = mu.value;
    rec.sigma_mu = std::isnan(fit.sigma_S) ? std::numeric_limits<double>::quiet_NaN()
                                           : mu.sigma;
    rec.K = thermal_shape_functions(mu.value).K;
    const double lo = mu.value - (std::isnan(rec.sigma_mu) ? 0.0 : rec.sigma_mu);
    const double hi = mu.value + (std::isnan(rec.sigma_mu) ? 0.0 : rec.sigma_mu);
    rec.K_low = thermal_shape_functions(std::max(0.0, lo)).K;
    rec.K_high = hi < 1.0 ? thermal_shape_functions(hi).K
                          : std::numeric_limits<double>::infinity();

    rec.lambda = thermal_weights(mu.value, K_max);
    for (const auto& p : points) {
        rec.labels.push_back(p.label);
        const double B = solve_B(p.g2, mu.value);
        rec.B_per_point.push_back(B);
        std::vector<double> row(rec.lambda.size());
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = B * rec.lambda[k];
        rec.r_matrix.push_back(std::move(row));
    }
    return rec;
}

}  // namespace sqz
