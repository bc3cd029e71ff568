#include "sqz/fock_stats.hpp"

#include <cmath>
#include <cstddef>

#include "sqz/errors.hpp"

namespace sqz {

std::uint64_t CountHistogram::total_events() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

int CountHistogram::observed_support() const {
    for (int n = static_cast<int>(counts.size()) - 1; n >= 0; --n)
        if (counts[static_cast<std::size_t>(n)] > 0) return n;
    return -1;
}

double PhotonDistribution::sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

int PhotonDistribution::support() const {
    for (int n = cutoff(); n >= 0; --n)
        if (probs[static_cast<std::size_t>(n)] != 0.0) return n;
    return -1;
}

PhotonDistribution from_counts(const CountHistogram& h) {
    const std::uint64_t total = h.total_events();
    if (total == 0) throw domain_error("from_counts: histogram has no events");
    PhotonDistribution d;
    d.probs.resize(h.counts.size());
    d.sigmas.resize(h.counts.size());
    const double n = static_cast<double>(total);
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double c = static_cast<double>(h.counts[i]);
        d.probs[i] = c / n;
        d.sigmas[i] = std::sqrt(c) / n;
    }
    d.total_events = total;
    return d;
}

ValueWithSigma mean_photon(const PhotonDistribution& d) {
    ValueWithSigma r;
    double var = 0.0;
    for (int n = 0; n <= d.cutoff(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        r.value += n * d.probs[i];
        var += static_cast<double>(n) * n * d.sigmas[i] * d.sigmas[i];
    }
    r.sigma = std::sqrt(var);
    return r;
}

// n! / (n-m)! = n (n-1) ... (n-m+1)
static double falling_factorial(int n, int m) {
    double f = 1.0;
    for (int j = 0; j < m; ++j) f *= n - j;
    return f;
}

ValueWithSigma g_factorial(const PhotonDistribution& d, int m) {
    if (m != 2 && m != 3) throw domain_error("g_factorial: order must be 2 or 3");
    double mu1 = 0.0, num = 0.0;
    for (int n = 0; n <= d.cutoff(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        mu1 += n * d.probs[i];
        num += falling_factorial(n, m) * d.probs[i];
    }
    if (mu1 <= 0.0) throw domain_error("g_factorial: zero mean photon number");

    const double g = num / std::pow(mu1, m);
    // dg/dP_n through both numerator and the <n>^m denominator
    double var = 0.0;
    for (int n = 0; n <= d.cutoff(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        const double dg = falling_factorial(n, m) / std::pow(mu1, m)
                        - m * n * num / std::pow(mu1, m + 1);
        var += dg * dg * d.sigmas[i] * d.sigmas[i];
    }
    return {g, std::sqrt(var)};
}

ValueWithSigma fano(const PhotonDistribution& d) {
    double mu1 = 0.0, mu2 = 0.0;
    for (int n = 0; n <= d.cutoff(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        mu1 += n * d.probs[i];
        mu2 += static_cast<double>(n) * n * d.probs[i];
    }
    if (mu1 <= 0.0) throw domain_error("fano: zero mean photon number");
    const double f = (mu2 - mu1 * mu1) / mu1;
    double var = 0.0;
    for (int n = 0; n <= d.cutoff(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        // d/dP_n [ (mu2 - mu1^2)/mu1 ] = n^2/mu1 - n (mu2/mu1^2 + 1)
        const double df = static_cast<double>(n) * n / mu1
                        - n * (mu2 / (mu1 * mu1) + 1.0);
        var += df * df * d.sigmas[i] * d.sigmas[i];
    }
    return {f, std::sqrt(var)};
}

std::vector<KlyshkoFigure> klyshko_figures(const PhotonDistribution& d, int n_max) {
    if (n_max < 1 || n_max + 1 > d.cutoff())
        throw domain_error("klyshko_figures: n_max outside distribution range");
    std::vector<KlyshkoFigure> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double a = d.probs[static_cast<std::size_t>(n - 1)];
        const double p = d.probs[static_cast<std::size_t>(n)];
        const double b = d.probs[static_cast<std::size_t>(n + 1)];
        KlyshkoFigure k;
        k.n = n;
        if (p == 0.0) {
            out.push_back(k);  // defined = false
            continue;
        }
        const double c = (n + 1.0) / n;
        k.value = c * a * b / (p * p);
        const double sa = d.sigmas[static_cast<std::size_t>(n - 1)];
        const double sp = d.sigmas[static_cast<std::size_t>(n)];
        const double sb = d.sigmas[static_cast<std::size_t>(n + 1)];
        const double da = c * b / (p * p);
        const double db = c * a / (p * p);
        const double dp = -2.0 * c * a * b / (p * p * p);
        k.sigma = std::sqrt(da * da * sa * sa + db * db * sb * sb + dp * dp * sp * sp);
        k.defined = true;
        out.push_back(k);
    }
    return out;
}

ValueWithSigma estimate_efficiency(const PhotonDistribution& d) {
    if (d.cutoff() < 2) throw domain_error("estimate_efficiency: need bins up to n = 2");
    const double p1 = d.probs[1];
    const double p2 = d.probs[2];
    if (p1 <= 0.0) throw domain_error("estimate_efficiency: empty one-photon bin");
    const double x = 2.0 * p2 / p1;
    const double eta = x / (1.0 + x);
    // d eta/dx = 1/(1+x)^2, dx/dP2 = 2/P1, dx/dP1 = -x/P1
    const double detadx = 1.0 / ((1.0 + x) * (1.0 + x));
    const double d1 = detadx * (-x / p1);
    const double d2 = detadx * (2.0 / p1);
    const double var = d1 * d1 * d.sigmas[1] * d.sigmas[1]
                     + d2 * d2 * d.sigmas[2] * d.sigmas[2];
    return {eta, std::sqrt(var)};
}

// Binomial(k, eta) pmf over m = 0..k via the stable ratio recurrence
// pmf(m+1) = pmf(m) * (k-m)/(m+1) * eta/(1-eta); avoids factorial overflow.
static std::vector<double> binomial_row(int k, double eta) {
    std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
    if (eta >= 1.0) {
        row[static_cast<std::size_t>(k)] = 1.0;
        return row;
    }
    row[0] = std::pow(1.0 - eta, k);
    const double ratio = eta / (1.0 - eta);
    for (int m = 0; m < k; ++m)
        row[static_cast<std::size_t>(m) + 1] =
            row[static_cast<std::size_t>(m)] * (static_cast<double>(k - m) / (m + 1)) * ratio;
    return row;
}

PhotonDistribution apply_loss(const PhotonDistribution& d, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw domain_error("apply_loss: transmission must lie in [0, 1]");
    PhotonDistribution out;
    out.probs.assign(d.probs.size(), 0.0);
    out.sigmas.assign(d.probs.size(), 0.0);
    out.compensated = false;
    out.total_events = d.total_events;
    std::vector<double> var(d.probs.size(), 0.0);
    for (int k = 0; k <= d.cutoff(); ++k) {
        const auto ik = static_cast<std::size_t>(k);
        if (d.probs[ik] == 0.0 && d.sigmas[ik] == 0.0) continue;
        const auto row = binomial_row(k, eta);
        for (int m = 0; m <= k; ++m) {
            const auto im = static_cast<std::size_t>(m);
            out.probs[im] += row[im] * d.probs[ik];
            var[im] += row[im] * row[im] * d.sigmas[ik] * d.sigmas[ik];
        }
    }
    for (std::size_t m = 0; m < var.size(); ++m) out.sigmas[m] = std::sqrt(var[m]);
    return out;
}

PhotonDistribution compensate_loss(const PhotonDistribution& d, double eta, int M) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw domain_error("compensate_loss: transmission must lie in (0, 1]");
    if (M < 1) throw domain_error("compensate_loss: M must be positive");
    if (d.support() > M)
        throw domain_error("compensate_loss: observed support exceeds inversion order M");

    // Lossy bins padded (or restricted; support above guarantees no mass lost)
    // to exactly M+1 entries.
    const auto size = static_cast<std::size_t>(M) + 1;
    std::vector<double> meas(size, 0.0), msig(size, 0.0);
    for (int n = 0; n <= std::min(M, d.cutoff()); ++n) {
        meas[static_cast<std::size_t>(n)] = d.probs[static_cast<std::size_t>(n)];
        msig[static_cast<std::size_t>(n)] = d.sigmas[static_cast<std::size_t>(n)];
    }

    // B[m][k] = C(k,m) eta^m (1-eta)^(k-m), upper triangular in (m, k).
    std::vector<std::vector<double>> B(size, std::vector<double>(size, 0.0));
    for (int k = 0; k <= M; ++k) {
        const auto row = binomial_row(k, eta);
        for (int m = 0; m <= k; ++m)
            B[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(m)];
    }

    // Back-substitution solves B p = meas from the top bin downward.
    auto solve = [&](const std::vector<double>& rhs) {
        std::vector<double> p(size, 0.0);
        for (int m = M; m >= 0; --m) {
            double acc = rhs[static_cast<std::size_t>(m)];
            for (int k = m + 1; k <= M; ++k)
                acc -= B[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
            p[static_cast<std::size_t>(m)] = acc / B[static_cast<std::size_t>(m)][static_cast<std::size_t>(m)];
        }
        return p;
    };

    PhotonDistribution out;
    out.probs = solve(meas);
    out.sigmas.assign(size, 0.0);
    out.compensated = true;
    out.total_events = d.total_events;

    // Column m of B^{-1} (solve on the unit vector) gives the sensitivity of
    // every reconstructed bin to measured bin m.
    std::vector<double> var(size, 0.0);
    std::vector<double> unit(size, 0.0);
    for (std::size_t m = 0; m < size; ++m) {
        if (msig[m] == 0.0) continue;
        unit[m] = 1.0;
        const auto col = solve(unit);
        unit[m] = 0.0;
        for (std::size_t k = 0; k < size; ++k)
            var[k] += col[k] * col[k] * msig[m] * msig[m];
    }
    for (std::size_t k = 0; k < size; ++k) out.sigmas[k] = std::sqrt(var[k]);
    return out;
}

}  // namespace sqz
