#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sqz/fock_stats.hpp"
#include "sqz/mode_inference.hpp"

namespace sqz {

struct AnalysisOptions {
    std::optional<double> eta;   // assumed transmission for compensation
    bool compensate = false;     // requires eta
    int compensation_order = 20;
    int klyshko_max = 6;         // clamped to the available bins
    std::string label;
};

// Photon-statistics block: moments and correlations with uncertainties,
// Klyshko figures, the efficiency estimate, and the raw (plus optionally
// loss-compensated) distribution.  Correlation figures are computed on the
// raw distribution — they are invariant under binomial loss.
nlohmann::json statistics_report(const PhotonDistribution& raw,
                                 const AnalysisOptions& opts);

nlohmann::json modes_report(const ModeReconstruction& rec);

// Common wrapper: schema version, generator stamp and the hash of the
// effective configuration, so a report identifies the run that made it
// without carrying timestamps (reruns stay byte-identical).
nlohmann::json report_envelope(const std::string& subcommand,
                               const nlohmann::json& effective_config);

void write_report(const nlohmann::json& report, const std::string& path);

extern const char* const kToolVersion;

}  // namespace sqz
