#include "sqz/report.hpp"

#include <algorithm>

#include "sqz/errors.hpp"
#include "sqz/serialize.hpp"

namespace sqz {

using nlohmann::json;

const char* const kToolVersion = "0.1.0";

json statistics_report(const PhotonDistribution& raw, const AnalysisOptions& opts) {
    if (opts.compensate && !opts.eta)
        throw domain_error("statistics_report: compensation needs an assumed eta");

    json stats;
    stats["cutoff"] = raw.cutoff();
    if (raw.total_events) stats["total_events"] = *raw.total_events;
    else stats["total_events"] = nullptr;
    stats["mean_photon"] = to_json(mean_photon(raw));
    stats["g2"] = to_json(g_factorial(raw, 2));
    stats["g3"] = to_json(g_factorial(raw, 3));
    stats["fano"] = to_json(fano(raw));

    const int n_max = std::min(opts.klyshko_max, raw.cutoff() - 1);
    json kly = json::array();
    if (n_max >= 1)
        for (const auto& k : klyshko_figures(raw, n_max)) {
            json item{{"n", k.n}, {"defined", k.defined}};
            item["value"] = k.defined ? json(k.value) : json(nullptr);
            item["sigma"] = k.defined ? json(k.sigma) : json(nullptr);
            kly.push_back(std::move(item));
        }
    stats["klyshko"] = std::move(kly);

    try {
        stats["efficiency_estimate"] = to_json(estimate_efficiency(raw));
    } catch (const domain_error&) {
        stats["efficiency_estimate"] = nullptr;  // no usable one-photon bin
    }

    stats["eta_assumed"] = opts.eta ? json(*opts.eta) : json(nullptr);
    stats["raw"] = to_json(raw);
    if (opts.compensate) {
        const auto comp = compensate_loss(raw, *opts.eta, opts.compensation_order);
        json c = to_json(comp);
        c["order"] = opts.compensation_order;
        c["norm_deviation"] = comp.sum() - 1.0;
        stats["compensated"] = std::move(c);
    } else {
        stats["compensated"] = nullptr;
    }
    return stats;
}

json modes_report(const ModeReconstruction& rec) {
    json points = json::array();
    for (std::size_t i = 0; i < rec.labels.size(); ++i)
        points.push_back(json{{"label", rec.labels[i]}, {"B", rec.B_per_point[i]}});

    return json{{"S", json{{"value", rec.S}, {"sigma", rec.sigma_S}}},
                {"mu", json{{"value", rec.mu}, {"sigma", rec.sigma_mu}}},
                {"K", rec.K},
                {"K_low", rec.K_low},
                {"K_high", rec.K_high},
                {"points", std::move(points)},
                {"lambda", rec.lambda},
                {"r_matrix", rec.r_matrix}};
}

json report_envelope(const std::string& subcommand, const json& effective_config) {
    return json{{"schema_version", 1},
                {"generator", json{{"tool", "sqz"},
                                   {"subcommand", subcommand},
                                   {"version", kToolVersion}}},
                {"config_hash", config_hash_hex(effective_config)},
                {"effective_config", effective_config}};
}

void write_report(const json& report, const std::string& path) {
    write_text_file(path, canonical_json(report));
}

}  // namespace sqz
