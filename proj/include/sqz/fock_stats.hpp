#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace sqz {

struct ValueWithSigma {
    double value = 0.0;
    double sigma = 0.0;
};

// Raw per-photon-number tallies; counts[n] is the number of events with n
// detected photons.
struct CountHistogram {
    std::vector<std::uint64_t> counts;

    std::uint64_t total_events() const;
    // Largest n with counts[n] > 0, or -1 if every bin is empty.
    int observed_support() const;
};

// Discrete photon-number distribution over n = 0..cutoff() with per-bin
// 1-sigma uncertainties.  Raw (measured or model) distributions have entries
// in [0,1]; only loss-compensated distributions may carry small negative
// entries, and those are marked with compensated = true.
struct PhotonDistribution {
    std::vector<double> probs;
    std::vector<double> sigmas;
    bool compensated = false;
    std::optional<std::uint64_t> total_events;

    int cutoff() const { return static_cast<int>(probs.size()) - 1; }
    double sum() const;
    // Probability mass beyond the cutoff (may be slightly negative for
    // compensated distributions).
    double tail_mass() const { return 1.0 - sum(); }
    // Largest n with probs[n] != 0, or -1 for the all-zero vector.
    int support() const;
};

// Normalize a count histogram into a distribution with Poisson bin errors
// sigma_n = sqrt(c_n)/N.  Rejects an all-empty histogram.
PhotonDistribution from_counts(const CountHistogram& h);

ValueWithSigma mean_photon(const PhotonDistribution& d);

// Normalized factorial-moment correlation g^(m) = <n(n-1)...(n-m+1)> / <n>^m
// for m = 2 or 3.  Uncertainty by linear propagation over independent bins.
ValueWithSigma g_factorial(const PhotonDistribution& d, int m);

// Variance-to-mean ratio.
ValueWithSigma fano(const PhotonDistribution& d);

struct KlyshkoFigure {
    int n = 0;
    double value = 0.0;
    double sigma = 0.0;
    bool defined = false;  // false when P_n == 0, where the ratio blows up
};

// K_n = (n+1) P_{n-1} P_{n+1} / (n P_n^2) for n = 1..n_max.  For even-only
// statistics the odd-n figures exceed 1 and the even-n figures dip below 1.
std::vector<KlyshkoFigure> klyshko_figures(const PhotonDistribution& d, int n_max);

// Detection-efficiency estimate from the one- and two-photon bins of a lossy
// even-pair source: with x = 2 P_2 / P_1, eta = x / (1 + x).
ValueWithSigma estimate_efficiency(const PhotonDistribution& d);

// Push a distribution through a binomial loss channel with transmission eta.
PhotonDistribution apply_loss(const PhotonDistribution& d, double eta);

// Invert the binomial loss channel on bins 0..M by back-substitution of the
// upper-triangular system.  Requires eta > 0 and M at least the observed
// support of d.  Uncertainties propagate through the explicit inverse.
PhotonDistribution compensate_loss(const PhotonDistribution& d, double eta, int M);

}  // namespace sqz
