#pragma once

#include <optional>
#include <vector>

#include "sqz/event_simulator.hpp"
#include "sqz/fock_stats.hpp"

namespace sqz {

struct HeightExtractionOptions {
    int baseline_window = 80;  // leading samples averaged for the baseline
    int smooth_window = 9;     // moving-average width (odd)
};

// Pulse height per record: baseline-subtracted, smoothed, signed extremum.
// Using the signed extremum keeps near-zero (vacuum) amplitudes Gaussian
// instead of folding them to positive values.
std::vector<double> extract_heights(const WaveformSet& w,
                                    const HeightExtractionOptions& opts = {});

struct GaussianPeak {
    double center = 0.0;  // same units as the heights
    double sigma = 0.0;
    double weight = 0.0;  // fraction of events under the peak
};

// Locate pulse-height classes: Freedman-Diaconis histogram, smoothed local
// maxima with a prominence rule, then a per-peak weighted Gaussian fit.
// Peaks come back sorted by center; overlapping classes are rejected.
std::vector<GaussianPeak> fit_peaks(const std::vector<double>& heights,
                                    int expected_max_peaks);

// Decision boundaries between adjacent peaks.  Heights below boundaries[0]
// map to bin 0, between boundaries[j-1] and boundaries[j] to bin j, and at or
// above the last boundary to the top bin.
struct ThresholdSet {
    std::vector<double> boundaries;

    int assign(double height) const;
};

struct CountAssignment {
    CountHistogram histogram;  // bin j = events in peak class j (0 = vacuum)
    ThresholdSet thresholds;
    double resolution_ev = 0.0;  // mean FWHM scaled to the photon energy
};

// Equal-likelihood thresholds from the fitted peaks (midpoint fallback when a
// pair is degenerate), count tally, and the energy resolution implied by the
// mean peak width, mean peak spacing and the photon energy.  A single peak
// needs an explicit spacing to fix the energy scale.
CountAssignment assign_counts(const std::vector<double>& heights,
                              const std::vector<GaussianPeak>& peaks,
                              double photon_energy_ev = 0.8,
                              std::optional<double> explicit_spacing = std::nullopt);

}  // namespace sqz
