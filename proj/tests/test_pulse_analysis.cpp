#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/event_simulator.hpp"
#include "sqz/pulse_analysis.hpp"

using namespace sqz;

namespace {

// Deterministic Gaussian mixture draws for peak-finding tests.
std::vector<double> mixture(const std::vector<double>& centers,
                            const std::vector<double>& sigmas,
                            const std::vector<std::size_t>& counts,
                            std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        std::normal_distribution<double> d(centers[k], sigmas[k]);
        for (std::size_t i = 0; i < counts[k]; ++i) out.push_back(d(gen));
    }
    std::shuffle(out.begin(), out.end(), gen);
    return out;
}

WaveformSet rectangle_record(double amplitude, int high_from, int high_to) {
    WaveformSet w;
    w.samples_per_record = 400;
    w.sample_interval_s = 1e-8;
    w.samples.assign(400, 0.25f);  // constant baseline offset
    for (int s = high_from; s < high_to; ++s)
        w.samples[static_cast<std::size_t>(s)] = static_cast<float>(0.25 + amplitude);
    return w;
}

}  // namespace

TEST_CASE("height extraction recovers a flat-top amplitude exactly") {
    // A rectangle longer than the smoothing window survives the moving
    // average untouched, so the extracted height is the amplitude itself.
    const auto w = rectangle_record(1.3, 150, 250);
    const auto h = extract_heights(w);
    REQUIRE(h.size() == 1);
    CHECK(h[0] == doctest::Approx(1.3).epsilon(1e-6));

    const auto neg = rectangle_record(-0.7, 150, 250);
    const auto hn = extract_heights(neg);
    CHECK(hn[0] == doctest::Approx(-0.7).epsilon(1e-6));
}

TEST_CASE("height extraction validates geometry") {
    const auto w = rectangle_record(1.0, 150, 250);
    HeightExtractionOptions opts;
    opts.baseline_window = 400;  // consumes the whole record
    CHECK_THROWS_AS(extract_heights(w, opts), domain_error);
    opts = {};
    opts.smooth_window = 4;  // must be odd
    CHECK_THROWS_AS(extract_heights(w, opts), domain_error);
    opts = {};
    opts.baseline_window = 0;
    CHECK_THROWS_AS(extract_heights(w, opts), domain_error);
    WaveformSet empty;
    CHECK_THROWS_AS(extract_heights(empty), domain_error);
}

TEST_CASE("smoothing averages within the stated window") {
    // An isolated unit spike turns into 1/window after smoothing.
    WaveformSet w;
    w.samples_per_record = 400;
    w.sample_interval_s = 1e-8;
    w.samples.assign(400, 0.0f);
    w.samples[200] = 9.0f;
    HeightExtractionOptions opts;
    opts.smooth_window = 9;
    const auto h = extract_heights(w, opts);
    CHECK(h[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("peak fitting resolves a three-class mixture") {
    const std::vector<double> centers{0.0, 0.8, 1.6};
    const std::vector<double> sigmas{0.085, 0.085, 0.085};
    const std::vector<std::size_t> counts{60000, 30000, 10000};
    const auto h = mixture(centers, sigmas, counts, 99);
    const auto peaks = fit_peaks(h, 8);
    REQUIRE(peaks.size() == 3);
    const double total = 100000.0;
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(peaks[k].center == doctest::Approx(centers[k]).epsilon(0).scale(1).epsilon(0.013));
        CHECK(peaks[k].sigma == doctest::Approx(sigmas[k]).epsilon(0.15));
        CHECK(peaks[k].weight ==
              doctest::Approx(static_cast<double>(counts[k]) / total).epsilon(0.10));
    }
    // Sorted by center.
    CHECK(peaks[0].center < peaks[1].center);
    CHECK(peaks[1].center < peaks[2].center);
}

TEST_CASE("peak fitting caps the number of classes") {
    const auto h = mixture({0.0, 0.8, 1.6, 2.4}, {0.08, 0.08, 0.08, 0.08},
                           {50000, 25000, 15000, 10000}, 5);
    const auto capped = fit_peaks(h, 2);
    CHECK(capped.size() == 2);
    // The two tallest classes survive.
    CHECK(capped[0].center == doctest::Approx(0.0).scale(1).epsilon(0.02));
    CHECK(capped[1].center == doctest::Approx(0.8).epsilon(0.03));
}

TEST_CASE("peak fitting validates its inputs") {
    CHECK_THROWS_AS(fit_peaks(std::vector<double>(500, 1.0), 4), domain_error);
    const auto h = mixture({0.0}, {0.1}, {2000}, 1);
    CHECK_THROWS_AS(fit_peaks(h, 0), domain_error);
    // All-identical heights give a degenerate histogram.
    CHECK_THROWS_AS(fit_peaks(std::vector<double>(2000, 0.5), 4), domain_error);
}

TEST_CASE("overlapping classes are rejected rather than fitted") {
    // A sharp minority class riding on a broad majority one: both pass the
    // prominence rule, but the fitted centers sit closer than twice the wider
    // width, which is unusable for counting.
    const auto h = mixture({0.0, 1.2}, {0.10, 0.65}, {12000, 88000}, 17);
    CHECK_THROWS_AS(fit_peaks(h, 4), domain_error);
}

TEST_CASE("threshold assignment is monotone and equal-likelihood") {
    const auto h = mixture({0.0, 0.8, 1.6}, {0.08, 0.08, 0.08},
                           {60000, 30000, 10000}, 23);
    const auto peaks = fit_peaks(h, 4);
    REQUIRE(peaks.size() == 3);
    const auto asg = assign_counts(h, peaks, 0.8);
    REQUIRE(asg.thresholds.boundaries.size() == 2);

    // Equal widths and a 2:1 weight ratio push the boundary slightly toward
    // the smaller peak; it stays within a tenth of a spacing of the midpoint.
    CHECK(asg.thresholds.boundaries[0] == doctest::Approx(0.4).epsilon(0.2));
    CHECK(asg.thresholds.boundaries[0] > 0.4 - 1e-9);
    CHECK(asg.thresholds.boundaries[1] == doctest::Approx(1.2).epsilon(0.2));

    CHECK(asg.thresholds.assign(-0.3) == 0);
    CHECK(asg.thresholds.assign(0.79) == 1);
    CHECK(asg.thresholds.assign(5.0) == 2);

    // Tally covers every event and roughly reproduces the mixture.
    std::uint64_t total = 0;
    for (auto c : asg.histogram.counts) total += c;
    CHECK(total == h.size());
    CHECK(static_cast<double>(asg.histogram.counts[0]) ==
          doctest::Approx(60000.0).epsilon(0.01));
    CHECK(static_cast<double>(asg.histogram.counts[1]) ==
          doctest::Approx(30000.0).epsilon(0.02));
    CHECK(static_cast<double>(asg.histogram.counts[2]) ==
          doctest::Approx(10000.0).epsilon(0.03));

    // 0.08 sigma on a 0.8 spacing at 0.8 eV quantum: FWHM 0.188 eV.
    CHECK(asg.resolution_ev == doctest::Approx(0.08 * 2.3548200450309493).epsilon(0.05));
}

TEST_CASE("asymmetric widths move the boundary toward the narrow class") {
    const auto h = mixture({0.0, 1.0}, {0.05, 0.18}, {50000, 50000}, 31);
    const auto peaks = fit_peaks(h, 2);
    REQUIRE(peaks.size() == 2);
    const auto asg = assign_counts(h, peaks, 0.8, 1.0);
    REQUIRE(asg.thresholds.boundaries.size() == 1);
    // The equal-likelihood crossing of a narrow and a wide Gaussian of equal
    // weight sits well below the midpoint.
    CHECK(asg.thresholds.boundaries[0] < 0.45);
    CHECK(asg.thresholds.boundaries[0] > 0.1);
}

TEST_CASE("single-peak assignment needs an explicit energy scale") {
    const auto h = mixture({0.2}, {0.05}, {20000}, 3);
    const auto peaks = fit_peaks(h, 1);
    REQUIRE(peaks.size() == 1);
    CHECK_THROWS_AS(assign_counts(h, peaks, 0.8), domain_error);
    const auto asg = assign_counts(h, peaks, 0.8, 0.8);
    CHECK(asg.thresholds.boundaries.empty());
    CHECK(asg.histogram.counts.size() == 1);
    CHECK(asg.histogram.counts[0] == 20000);
    CHECK(asg.resolution_ev == doctest::Approx(0.05 * 2.3548200450309493).epsilon(0.05));
}

TEST_CASE("assignment validates peak ordering and scale") {
    const auto h = mixture({0.0, 0.8}, {0.08, 0.08}, {30000, 20000}, 7);
    auto peaks = fit_peaks(h, 2);
    REQUIRE(peaks.size() == 2);
    auto swapped = peaks;
    std::swap(swapped[0], swapped[1]);
    CHECK_THROWS_AS(assign_counts(h, swapped, 0.8), domain_error);
    CHECK_THROWS_AS(assign_counts(h, peaks, 0.0), domain_error);
    CHECK_THROWS_AS(assign_counts(h, {}, 0.8), domain_error);
}

TEST_CASE("analysis is affine-invariant up to binning jitter") {
    const auto h = mixture({0.0, 0.8, 1.6}, {0.08, 0.08, 0.08},
                           {50000, 25000, 12000}, 41);
    std::vector<double> scaled(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) scaled[i] = 2.5 * h[i] + 0.7;

    const auto pa = fit_peaks(h, 4);
    const auto pb = fit_peaks(scaled, 4);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
        CHECK(pb[k].center == doctest::Approx(2.5 * pa[k].center + 0.7).epsilon(0.01).scale(0.02));
        CHECK(pb[k].sigma == doctest::Approx(2.5 * pa[k].sigma).epsilon(0.03));
        CHECK(pb[k].weight == doctest::Approx(pa[k].weight).epsilon(0.02));
    }

    const auto aa = assign_counts(h, pa, 0.8);
    const auto ab = assign_counts(scaled, pb, 0.8);
    REQUIRE(aa.histogram.counts.size() == ab.histogram.counts.size());
    for (std::size_t j = 0; j < aa.histogram.counts.size(); ++j) {
        const double da = static_cast<double>(aa.histogram.counts[j]);
        const double db = static_cast<double>(ab.histogram.counts[j]);
        CHECK(std::abs(da - db) <= 0.002 * static_cast<double>(h.size()));
    }
    CHECK(ab.resolution_ev == doctest::Approx(aa.resolution_ev).epsilon(0.03));
}

TEST_CASE("synthesized waveforms round-trip to their generating counts") {
    // Full chain: known per-class event counts -> pulse records -> heights ->
    // peaks -> thresholds -> recovered histogram.
    ExperimentConfig cfg;
    cfg.source = SqueezerSpec::from_modes({0.1});  // source unused here
    cfg.seed = 12;
    cfg.waveform.resolution_fwhm_ev = 0.2;
    cfg.waveform.baseline_noise_rms_ev = 0.01;

    const std::vector<std::uint64_t> gen{24000, 3500, 1000, 500};
    std::vector<int> events;
    for (std::size_t n = 0; n < gen.size(); ++n)
        for (std::uint64_t i = 0; i < gen[n]; ++i)
            events.push_back(static_cast<int>(n));
    // Deterministic interleave so chunk boundaries see every class.
    std::mt19937_64 sh(77);
    std::shuffle(events.begin(), events.end(), sh);

    const auto w = synthesize_waveforms(events, cfg);
    const auto h = extract_heights(w);
    REQUIRE(h.size() == events.size());
    const auto peaks = fit_peaks(h, 8);
    REQUIRE(peaks.size() == 4);
    const auto asg = assign_counts(h, peaks, cfg.waveform.photon_energy_ev);

    REQUIRE(asg.histogram.counts.size() == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        const double got = static_cast<double>(asg.histogram.counts[n]);
        const double want = static_cast<double>(gen[n]);
        CHECK(std::abs(got - want) <= 3.0 * std::sqrt(want) + 3.0);
    }
    CHECK(asg.resolution_ev == doctest::Approx(0.2).epsilon(0.15));
}
