#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sqz/errors.hpp"
#include "sqz/fock_stats.hpp"

using namespace sqz;

static PhotonDistribution dist_from(const std::vector<double>& p) {
    PhotonDistribution d;
    d.probs = p;
    d.sigmas.assign(p.size(), 0.0);
    return d;
}

TEST_CASE("from_counts normalizes and carries Poisson bin errors") {
    CountHistogram h;
    h.counts = {900, 0, 90, 0, 10};
    CHECK(h.total_events() == 1000);
    CHECK(h.observed_support() == 4);
    const auto d = from_counts(h);
    CHECK(d.probs[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(d.probs[2] == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.sigmas[0] == doctest::Approx(std::sqrt(900.0) / 1000.0));
    CHECK(d.sigmas[1] == 0.0);
    CHECK(d.total_events.value() == 1000);
    CHECK_FALSE(d.compensated);

    CountHistogram empty;
    empty.counts = {0, 0};
    CHECK_THROWS_AS(from_counts(empty), domain_error);
}

TEST_CASE("factorial correlations reproduce Poisson and thermal references") {
    const auto pois = dist_from(oracle::poisson_probs(0.3, 20));
    CHECK(g_factorial(pois, 2).value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g_factorial(pois, 3).value == doctest::Approx(1.0).epsilon(1e-6));

    const auto th = dist_from(oracle::thermal_probs(0.2, 40));
    CHECK(g_factorial(th, 2).value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g_factorial(th, 3).value == doctest::Approx(6.0).epsilon(1e-6));

    CHECK_THROWS_AS(g_factorial(pois, 1), domain_error);
    CHECK_THROWS_AS(g_factorial(pois, 4), domain_error);
    CHECK_THROWS_AS(g_factorial(dist_from({1.0, 0.0}), 2), domain_error);  // zero mean
}

TEST_CASE("fano matches the identity 1 + <n>(g2 - 1)") {
    const auto pois = dist_from(oracle::poisson_probs(0.7, 25));
    CHECK(fano(pois).value == doctest::Approx(1.0).epsilon(1e-9));

    const auto th = dist_from(oracle::thermal_probs(0.35, 60));
    const double n = mean_photon(th).value;
    const double g2 = g_factorial(th, 2).value;
    CHECK(fano(th).value == doctest::Approx(1.0 + n * (g2 - 1.0)).epsilon(1e-12));
}

TEST_CASE("klyshko figures are flat for Poisson and flag empty bins") {
    const auto pois = dist_from(oracle::poisson_probs(1.0, 12));
    const auto ks = klyshko_figures(pois, 6);
    REQUIRE(ks.size() == 6);
    for (const auto& k : ks) {
        CHECK(k.defined);
        CHECK(k.value == doctest::Approx(1.0).epsilon(1e-12));
    }

    auto gapped = dist_from({0.9, 0.0, 0.09, 0.0, 0.01});
    const auto kg = klyshko_figures(gapped, 3);
    CHECK_FALSE(kg[0].defined);  // P_1 = 0
    CHECK(kg[1].defined);
    CHECK_FALSE(kg[2].defined);

    CHECK_THROWS_AS(klyshko_figures(pois, 12), domain_error);  // needs P_{n+1}
}

TEST_CASE("statistic uncertainties agree with finite-difference propagation") {
    CountHistogram h;
    h.counts = {96000, 2200, 1500, 200, 80, 15, 5};
    const auto d = from_counts(h);

    const auto wrap = [](const std::function<double(const PhotonDistribution&)>& f,
                         const PhotonDistribution& base) {
        return [f, base](const std::vector<double>& p) {
            PhotonDistribution t = base;
            t.probs = p;
            return f(t);
        };
    };

    const double s_g2 = oracle::fd_sigma(
        wrap([](const PhotonDistribution& t) { return g_factorial(t, 2).value; }, d),
        d.probs, d.sigmas);
    CHECK(g_factorial(d, 2).sigma == doctest::Approx(s_g2).epsilon(1e-4));

    const double s_g3 = oracle::fd_sigma(
        wrap([](const PhotonDistribution& t) { return g_factorial(t, 3).value; }, d),
        d.probs, d.sigmas);
    CHECK(g_factorial(d, 3).sigma == doctest::Approx(s_g3).epsilon(1e-4));

    const double s_f = oracle::fd_sigma(
        wrap([](const PhotonDistribution& t) { return fano(t).value; }, d),
        d.probs, d.sigmas);
    CHECK(fano(d).sigma == doctest::Approx(s_f).epsilon(1e-4));

    const double s_k2 = oracle::fd_sigma(
        wrap([](const PhotonDistribution& t) { return klyshko_figures(t, 3)[1].value; }, d),
        d.probs, d.sigmas);
    CHECK(klyshko_figures(d, 3)[1].sigma == doctest::Approx(s_k2).epsilon(1e-4));

    const double s_eta = oracle::fd_sigma(
        wrap([](const PhotonDistribution& t) { return estimate_efficiency(t).value; }, d),
        d.probs, d.sigmas);
    CHECK(estimate_efficiency(d).sigma == doctest::Approx(s_eta).epsilon(1e-4));
}

TEST_CASE("efficiency estimator inverts a weak pair source exactly") {
    // Only p_0 and p_2 populated: P_1 = 2 eta (1-eta) p_2 and P_2 = eta^2 p_2,
    // so 2 P_2 / P_1 = eta / (1 - eta) and the estimator is exact.
    const double eta = 0.462;
    auto pure = dist_from({0.999, 0.0, 0.001});
    const auto lossy = apply_loss(pure, eta);
    CHECK(estimate_efficiency(lossy).value == doctest::Approx(eta).epsilon(1e-12));

    CHECK_THROWS_AS(estimate_efficiency(dist_from({1.0, 0.0, 0.0})), domain_error);
    CHECK_THROWS_AS(estimate_efficiency(dist_from({1.0, 0.0})), domain_error);
}

TEST_CASE("loss channel matches the direct binomial sum") {
    const std::vector<double> p = {0.55, 0.0, 0.3, 0.0, 0.1, 0.0, 0.05};
    const auto lossy = apply_loss(dist_from(p), 0.37);
    const auto ref = oracle::binomial_loss_direct(p, 0.37);
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(lossy.probs[i] == doctest::Approx(ref[i]).epsilon(1e-13));
}

TEST_CASE("loss channel endpoints, mean scaling and normalization") {
    const auto d = dist_from(oracle::thermal_probs(0.4, 30));
    const auto id = apply_loss(d, 1.0);
    for (int n = 0; n <= d.cutoff(); ++n)
        CHECK(id.probs[static_cast<std::size_t>(n)] ==
              doctest::Approx(d.probs[static_cast<std::size_t>(n)]).epsilon(1e-14));

    const auto dark = apply_loss(d, 0.0);
    CHECK(dark.probs[0] == doctest::Approx(d.sum()).epsilon(1e-14));
    CHECK(mean_photon(dark).value == doctest::Approx(0.0));

    const auto half = apply_loss(d, 0.5);
    CHECK(half.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_photon(half).value ==
          doctest::Approx(0.5 * mean_photon(d).value).epsilon(1e-12));

    // Factorial correlations are loss-invariant.
    CHECK(g_factorial(half, 2).value ==
          doctest::Approx(g_factorial(d, 2).value).epsilon(1e-12));
    CHECK(g_factorial(half, 3).value ==
          doctest::Approx(g_factorial(d, 3).value).epsilon(1e-11));

    CHECK_THROWS_AS(apply_loss(d, -0.1), domain_error);
    CHECK_THROWS_AS(apply_loss(d, 1.1), domain_error);
}

TEST_CASE("loss compensation inverts the channel on narrow-support input") {
    std::vector<double> p(11, 0.0);
    p[0] = 0.92;
    p[2] = 0.05;
    p[4] = 0.02;
    p[6] = 0.006;
    p[8] = 0.003;
    p[10] = 0.001;
    const double eta = 0.462;
    const auto lossy = apply_loss(dist_from(p), eta);
    const auto back = compensate_loss(lossy, eta, 20);
    CHECK(back.compensated);
    CHECK(back.cutoff() == 20);
    for (std::size_t n = 0; n < p.size(); ++n)
        CHECK(std::abs(back.probs[n] - p[n]) < 1e-9);
    for (int n = 11; n <= 20; ++n)
        CHECK(std::abs(back.probs[static_cast<std::size_t>(n)]) < 1e-9);
    CHECK(back.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("loss compensation rejects bad arguments and handles eta = 1") {
    const auto d = dist_from({0.9, 0.05, 0.05});
    CHECK_THROWS_AS(compensate_loss(d, 0.0, 20), domain_error);
    CHECK_THROWS_AS(compensate_loss(d, 0.5, 1), domain_error);  // support 2 > M

    const auto same = compensate_loss(d, 1.0, 5);
    for (std::size_t n = 0; n < 3; ++n)
        CHECK(same.probs[n] == doctest::Approx(d.probs[n]).epsilon(1e-14));
}

TEST_CASE("compensation uncertainties follow the linear inverse map") {
    CountHistogram h;
    h.counts = {994154, 4077, 1760, 8, 1};
    const auto d = from_counts(h);
    const auto comp = compensate_loss(d, 0.462, 12);
    const auto fd = [&](const std::vector<double>& p) {
        PhotonDistribution t = d;
        t.probs = p;
        return compensate_loss(t, 0.462, 12).probs[2];
    };
    const double s2 = oracle::fd_sigma(fd, d.probs, d.sigmas);
    CHECK(comp.sigmas[2] == doctest::Approx(s2).epsilon(1e-5));
}

TEST_CASE("klyshko pattern alternates for a lossy two-photon source") {
    // Even-pair emission through loss keeps odd-bin suppression visible:
    // K_1 and K_3 large, K_2 well below one.
    std::vector<double> p(11, 0.0);
    const double r = 0.3;
    const double t2 = std::tanh(r) * std::tanh(r);
    double v = 1.0 / std::cosh(r);
    for (int n = 0; 2 * n <= 10; ++n) {
        p[static_cast<std::size_t>(2 * n)] = v;
        v *= t2 * (2.0 * n + 1.0) / (2.0 * n + 2.0);
    }
    const auto lossy = apply_loss(dist_from(p), 0.462);
    const auto ks = klyshko_figures(lossy, 4);
    CHECK(ks[0].value > 1.0);   // K_1
    CHECK(ks[1].value < 1.0);   // K_2
    CHECK(ks[2].value > 1.0);   // K_3
    CHECK(ks[3].value < 1.0);   // K_4
}
