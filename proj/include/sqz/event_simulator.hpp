#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqz/fock_stats.hpp"
#include "sqz/squeezer_model.hpp"

namespace sqz {

// Synthetic detector pulse shaping.  Amplitudes are in units of eV: an
// n-photon record peaks at n * photon_energy_ev plus Gaussian smearing with
// the stated FWHM (applied to every record, vacuum included, so each pulse
// height class has the detector resolution width).
struct WaveformOptions {
    int samples_per_record = 1000;
    double sample_interval_s = 1e-8;
    double photon_energy_ev = 0.8;
    double resolution_fwhm_ev = 0.2;
    double baseline_noise_rms_ev = 0.01;
    int pulse_start_sample = 100;
    double rise_samples = 20.0;
    double decay_samples = 150.0;
};

struct ExperimentConfig {
    SqueezerSpec source;
    double eta = 1.0;  // detection transmission applied by Bernoulli thinning
    std::uint64_t n_events = 0;
    std::uint64_t seed = 1;
    WaveformOptions waveform;
};

// Detected photon number for every event.  Sampling is chunked into fixed
// 65536-event substreams keyed by (seed, chunk index), so results are
// bit-identical for a given config regardless of the thread count.
std::vector<int> sample_events(const ExperimentConfig& cfg, int threads = 1);

// Tally of sample_events into a histogram.
CountHistogram sample_counts(const ExperimentConfig& cfg, int threads = 1);

struct WaveformSet {
    std::uint32_t samples_per_record = 0;
    double sample_interval_s = 0.0;
    std::vector<float> samples;  // record-major

    std::size_t n_records() const {
        return samples_per_record == 0 ? 0 : samples.size() / samples_per_record;
    }
};

// One pulse record per event, deterministic under the same chunked-substream
// scheme as sample_events (with a separate stream label).
WaveformSet synthesize_waveforms(const std::vector<int>& counts_per_event,
                                 const ExperimentConfig& cfg);

// Binary waveform container: magic "TESW", version u16 = 1, header
// {u32 n_records, u32 samples_per_record, f64 sample_interval_s}, then the
// f32 payload record-major.  All fields little-endian.
void write_tesw(const WaveformSet& w, const std::string& path);
WaveformSet read_tesw(const std::string& path);

}  // namespace sqz
