#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqz/event_simulator.hpp"
#include "sqz/fock_stats.hpp"
#include "sqz/jsa_spectrum.hpp"
#include "sqz/mode_inference.hpp"
#include "sqz/pulse_analysis.hpp"
#include "sqz/squeezer_model.hpp"

namespace sqz {

// --- files -----------------------------------------------------------------

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Deterministic JSON serialization: keys sorted, doubles printed with %.12g,
// non-finite numbers emitted as null, trailing newline.  Reruns with the same
// inputs produce byte-identical files.
std::string canonical_json(const nlohmann::json& j);

// FNV-1a over the canonical serialization, as a 16-digit hex string.
std::string config_hash_hex(const nlohmann::json& j);

// --- JSON views of core types ----------------------------------------------

nlohmann::json to_json(const ValueWithSigma& v);
nlohmann::json to_json(const PhotonDistribution& d);

// Config sections.  Each parser accepts the object for its named section and
// rejects unknown keys so typos surface early.
SqueezerSpec squeezer_from_json(const nlohmann::json& section);
nlohmann::json to_json(const SqueezerSpec& s);

WaveformOptions waveform_from_json(const nlohmann::json& section);
nlohmann::json to_json(const WaveformOptions& w);

SellmeierCoefficients sellmeier_from_json(const nlohmann::json& section);
CrystalSpec crystal_from_json(const nlohmann::json& section);
PumpSpec pump_from_json(const nlohmann::json& section);
FrequencyGrid grid_from_json(const nlohmann::json& section);

// --- CSV -------------------------------------------------------------------

void write_counts_csv(const CountHistogram& h, const std::string& path);
CountHistogram read_counts_csv(const std::string& path);

void write_distribution_csv(const PhotonDistribution& d, const std::string& path);
void write_spectrum_csv(const MarginalSpectrum& s, const std::string& path);
void write_schmidt_csv(const std::vector<double>& lambdas, const std::string& path);
void write_peaks_csv(const std::vector<GaussianPeak>& peaks, const std::string& path);
void write_reconstruction_csv(const ModeReconstruction& rec, const std::string& path);

std::vector<CorrelationPoint> read_points_csv(const std::string& path);
void write_points_csv(const std::vector<CorrelationPoint>& pts, const std::string& path);

}  // namespace sqz
