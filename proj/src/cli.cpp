#include "sqz/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/event_simulator.hpp"
#include "sqz/fock_stats.hpp"
#include "sqz/jsa_spectrum.hpp"
#include "sqz/mode_inference.hpp"
#include "sqz/pulse_analysis.hpp"
#include "sqz/report.hpp"
#include "sqz/serialize.hpp"
#include "sqz/squeezer_model.hpp"

namespace sqz {

using nlohmann::json;

namespace {

const char* const kSections[] = {"schema_version", "squeezer_model", "event_simulator",
                                 "fock_stats",     "mode_inference", "jsa_spectrum",
                                 "pulse_analysis"};

json load_config_or_empty(const std::string& path) {
    if (path.empty()) return json::object();
    json j = load_json_file(path);
    if (!j.is_object()) throw io_error(path + ": config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* s : kSections)
            if (it.key() == s) known = true;
        if (!known) throw io_error(path + ": unknown section \"" + it.key() + "\"");
    }
    if (j.contains("schema_version") && j["schema_version"] != 1)
        throw io_error(path + ": unsupported schema_version");
    return j;
}

json section(const json& cfg, const char* name) {
    return cfg.contains(name) ? cfg[name] : json::object();
}

std::string basename_of(const std::string& path) {
    const auto pos = path.find_last_of("/\\");
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::optional<double> mu, B, eta;
    std::optional<int> K_max;
    std::vector<double> r_list;
    std::optional<std::uint64_t> events, seed;
    int threads = 1;
    std::string out_counts, out_waveforms;
};

int run_simulate(const SimulateArgs& a) {
    json cfg = load_config_or_empty(a.config);

    json sq = section(cfg, "squeezer_model");
    if (!a.r_list.empty()) sq = json{{"r_list", a.r_list}};
    if (a.mu) sq["mu"] = *a.mu;
    if (a.B) sq["B"] = *a.B;
    if (a.K_max) sq["K_max"] = *a.K_max;
    if (sq.empty())
        throw io_error("simulate: no source parameters (give --mu/--B, --r or a config file)");
    if (sq.contains("mu") && !sq.contains("K_max")) sq["K_max"] = 40;

    json ev = section(cfg, "event_simulator");
    if (a.eta) ev["eta"] = *a.eta;
    if (a.events) ev["events"] = *a.events;
    if (a.seed) ev["seed"] = *a.seed;
    if (!ev.contains("events"))
        throw io_error("simulate: event count missing (--events or config)");
    if (!ev.contains("eta")) ev["eta"] = 1.0;
    if (!ev.contains("seed")) ev["seed"] = 1;

    ExperimentConfig ec;
    ec.source = squeezer_from_json(sq);
    if (!ev["eta"].is_number()) throw io_error("event_simulator: \"eta\" must be a number");
    ec.eta = ev["eta"].get<double>();
    if (!ev["events"].is_number_unsigned() && !ev["events"].is_number_integer())
        throw io_error("event_simulator: \"events\" must be an integer");
    ec.n_events = ev["events"].get<std::uint64_t>();
    ec.seed = ev["seed"].get<std::uint64_t>();
    if (ev.contains("waveform")) ec.waveform = waveform_from_json(ev["waveform"]);

    const auto events = sample_events(ec, a.threads);
    int maxn = 0;
    for (int v : events) maxn = std::max(maxn, v);
    CountHistogram h;
    h.counts.assign(static_cast<std::size_t>(maxn) + 1, 0);
    for (int v : events) ++h.counts[static_cast<std::size_t>(v)];

    if (!a.out_counts.empty()) write_counts_csv(h, a.out_counts);
    if (!a.out_waveforms.empty())
        write_tesw(synthesize_waveforms(events, ec), a.out_waveforms);

    double mean = 0.0;
    for (std::size_t n = 0; n < h.counts.size(); ++n)
        mean += static_cast<double>(n) * static_cast<double>(h.counts[n]);
    mean /= static_cast<double>(ec.n_events);
    std::printf("events=%llu detected_mean=%.6g max_count=%d\n",
                static_cast<unsigned long long>(ec.n_events), mean, maxn);
    return 0;
}

// --- pulse -------------------------------------------------------------------

struct PulseArgs {
    std::string input, config, out_counts, out_peaks;
    std::optional<int> max_peaks, baseline_window, smooth_window;
    std::optional<double> photon_energy, spacing;
};

int run_pulse(const PulseArgs& a) {
    json cfg = load_config_or_empty(a.config);
    json pa = section(cfg, "pulse_analysis");

    HeightExtractionOptions opts;
    int max_peaks = 8;
    double photon_energy = 0.8;
    if (pa.contains("baseline_window")) opts.baseline_window = pa["baseline_window"].get<int>();
    if (pa.contains("smooth_window")) opts.smooth_window = pa["smooth_window"].get<int>();
    if (pa.contains("max_peaks")) max_peaks = pa["max_peaks"].get<int>();
    if (pa.contains("photon_energy_ev")) photon_energy = pa["photon_energy_ev"].get<double>();
    if (a.baseline_window) opts.baseline_window = *a.baseline_window;
    if (a.smooth_window) opts.smooth_window = *a.smooth_window;
    if (a.max_peaks) max_peaks = *a.max_peaks;
    if (a.photon_energy) photon_energy = *a.photon_energy;

    const auto waves = read_tesw(a.input);
    const auto heights = extract_heights(waves, opts);
    const auto peaks = fit_peaks(heights, max_peaks);
    const auto assignment = assign_counts(heights, peaks, photon_energy, a.spacing);

    write_counts_csv(assignment.histogram, a.out_counts);
    if (!a.out_peaks.empty()) write_peaks_csv(peaks, a.out_peaks);

    std::printf("records=%zu peaks=%zu resolution_ev=%.6g\n", heights.size(), peaks.size(),
                assignment.resolution_ev);
    return 0;
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
    std::string input, config, out_report, raw_csv, compensated_csv, label;
    std::optional<double> eta;
    bool compensate = false;
    std::optional<int> order, klyshko_max;
};

int run_analyze(const AnalyzeArgs& a) {
    json cfg = load_config_or_empty(a.config);
    json fs = section(cfg, "fock_stats");

    AnalysisOptions opts;
    if (fs.contains("eta")) opts.eta = fs["eta"].get<double>();
    if (fs.contains("compensate")) opts.compensate = fs["compensate"].get<bool>();
    if (fs.contains("compensation_order")) opts.compensation_order = fs["compensation_order"].get<int>();
    if (fs.contains("klyshko_max")) opts.klyshko_max = fs["klyshko_max"].get<int>();
    if (a.eta) opts.eta = *a.eta;
    if (a.compensate) opts.compensate = true;
    if (a.order) opts.compensation_order = *a.order;
    if (a.klyshko_max) opts.klyshko_max = *a.klyshko_max;
    opts.label = a.label.empty() ? basename_of(a.input) : a.label;
    if (opts.compensate && !opts.eta)
        throw io_error("analyze: --compensate needs --eta (or eta in the config)");

    const auto counts = read_counts_csv(a.input);
    const auto dist = from_counts(counts);
    const json stats = statistics_report(dist, opts);

    json effective{{"fock_stats",
                    json{{"eta", opts.eta ? json(*opts.eta) : json(nullptr)},
                         {"compensate", opts.compensate},
                         {"compensation_order", opts.compensation_order},
                         {"klyshko_max", opts.klyshko_max}}}};
    json report = report_envelope("analyze", effective);
    report["label"] = opts.label;
    report["input"] = a.input;
    report["photon_statistics"] = stats;
    write_report(report, a.out_report);

    if (!a.raw_csv.empty()) write_distribution_csv(dist, a.raw_csv);
    if (!a.compensated_csv.empty()) {
        if (!opts.compensate)
            throw io_error("analyze: --compensated-csv needs --compensate");
        write_distribution_csv(
            compensate_loss(dist, *opts.eta, opts.compensation_order), a.compensated_csv);
    }

    std::printf("events=%llu g2=%.6g g3=%.6g\n",
                static_cast<unsigned long long>(*dist.total_events),
                stats["g2"]["value"].get<double>(), stats["g3"]["value"].get<double>());
    return 0;
}

// --- fit-modes ----------------------------------------------------------------

struct FitModesArgs {
    std::vector<std::string> reports;
    std::string points_csv, config, out_report, out_csv;
    std::optional<int> K_max;
};

int run_fit_modes(const FitModesArgs& a) {
    json cfg = load_config_or_empty(a.config);
    json mi = section(cfg, "mode_inference");
    int K_max = mi.contains("K_max") ? mi["K_max"].get<int>() : 40;
    if (a.K_max) K_max = *a.K_max;

    std::vector<CorrelationPoint> pts;
    if (!a.points_csv.empty()) {
        pts = read_points_csv(a.points_csv);
    } else {
        if (a.reports.size() < 2)
            throw io_error("fit-modes: need --points or at least two analyze reports");
        for (const auto& path : a.reports) {
            const json r = load_json_file(path);
            if (!r.contains("photon_statistics"))
                throw io_error(path + ": not an analyze report (no photon_statistics)");
            const json& st = r["photon_statistics"];
            CorrelationPoint p;
            p.g2 = st["g2"]["value"].get<double>();
            p.sigma_g2 = st["g2"]["sigma"].get<double>();
            p.g3 = st["g3"]["value"].get<double>();
            p.sigma_g3 = st["g3"]["sigma"].get<double>();
            p.label = r.contains("label") ? r["label"].get<std::string>() : basename_of(path);
            pts.push_back(std::move(p));
        }
    }

    const auto rec = reconstruct_modes(pts, K_max);

    json in_points = json::array();
    for (const auto& p : pts)
        in_points.push_back(json{{"label", p.label},
                                 {"g2", p.g2},
                                 {"sigma_g2", p.sigma_g2},
                                 {"g3", p.g3},
                                 {"sigma_g3", p.sigma_g3}});
    json effective{{"mode_inference", json{{"K_max", K_max}}}};
    json report = report_envelope("fit-modes", effective);
    report["input_points"] = std::move(in_points);
    report["modes"] = modes_report(rec);
    write_report(report, a.out_report);
    if (!a.out_csv.empty()) write_reconstruction_csv(rec, a.out_csv);

    std::printf("S=%.6g sigma_S=%.6g mu=%.6g K=%.6g\n", rec.S, rec.sigma_S, rec.mu, rec.K);
    return 0;
}

// --- spectrum -----------------------------------------------------------------

struct SpectrumArgs {
    std::string config, out_csv, schmidt_csv, report_path;
    std::optional<int> modes;
};

int run_spectrum(const SpectrumArgs& a) {
    if (a.config.empty()) throw io_error("spectrum: --config is required");
    const json cfg = load_config_or_empty(a.config);
    if (!cfg.contains("jsa_spectrum"))
        throw io_error(a.config + ": missing \"jsa_spectrum\" section");
    const json& js = cfg["jsa_spectrum"];
    for (const char* key : {"crystal", "pump", "sellmeier", "grid"})
        if (!js.contains(key))
            throw io_error(a.config + ": jsa_spectrum needs \"" + key + "\"");

    const auto crystal = crystal_from_json(js["crystal"]);
    const auto pump = pump_from_json(js["pump"]);
    const auto coeffs = sellmeier_from_json(js["sellmeier"]);
    const auto grid = grid_from_json(js["grid"]);
    const int keep = a.modes ? *a.modes : 40;

    const auto jsa = build_jsa(crystal, coeffs, pump, grid);
    const auto marg = marginal_spectrum(jsa);
    if (!a.out_csv.empty()) write_spectrum_csv(marg, a.out_csv);

    json spec_block;
    spec_block["fwhm_nm"] = marg.fwhm_defined ? json(marg.fwhm_nm) : json(nullptr);

    const bool want_schmidt = !a.schmidt_csv.empty() || !a.report_path.empty();
    if (want_schmidt) {
        const auto sm = schmidt_decompose(jsa, keep);
        if (!a.schmidt_csv.empty()) {
            std::vector<double> head(sm.lambdas.begin(),
                                     sm.lambdas.begin() +
                                         std::min<std::size_t>(sm.lambdas.size(),
                                                               static_cast<std::size_t>(keep)));
            write_schmidt_csv(head, a.schmidt_csv);
        }
        spec_block["effective_mode_number"] = effective_mode_number(sm.lambdas);
        try {
            const auto fit = fit_thermal_mu(sm.lambdas);
            spec_block["thermal_mu"] = fit.mu;
            spec_block["thermal_fit_residual"] = fit.residual;
        } catch (const domain_error&) {
            spec_block["thermal_mu"] = nullptr;
            spec_block["thermal_fit_residual"] = nullptr;
        }
        std::printf("fwhm_nm=%.6g K=%.6g\n",
                    marg.fwhm_defined ? marg.fwhm_nm : -1.0,
                    spec_block["effective_mode_number"].get<double>());
    } else {
        std::printf("fwhm_nm=%.6g\n", marg.fwhm_defined ? marg.fwhm_nm : -1.0);
    }

    if (!a.report_path.empty()) {
        json effective{{"jsa_spectrum", js}};
        json report = report_envelope("spectrum", effective);
        report["spectrum"] = std::move(spec_block);
        write_report(report, a.report_path);
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Photon-number statistics and mode structure of pulsed squeezed light"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate",
                                 "Sample detected photon counts (and optional waveforms)");
    s->add_option("--config", sim.config, "JSON config file");
    s->add_option("--mu", sim.mu, "mode-ladder decay parameter in [0,1)");
    s->add_option("--B", sim.B, "overall gain");
    s->add_option("--K-max", sim.K_max, "number of ladder modes minus one");
    auto* ropt = s->add_option("--r", sim.r_list, "explicit per-mode squeezing list")
                     ->delimiter(',');
    ropt->excludes("--mu")->excludes("--B")->excludes("--K-max");
    s->add_option("--eta", sim.eta, "detection transmission in [0,1]");
    s->add_option("--events", sim.events, "number of events to draw");
    s->add_option("--seed", sim.seed, "RNG seed");
    s->add_option("--threads", sim.threads, "worker threads (does not change results)");
    s->add_option("--out", sim.out_counts, "output counts CSV");
    s->add_option("--waveforms", sim.out_waveforms, "output TESW waveform file");

    PulseArgs pul;
    auto* p = app.add_subcommand("pulse", "Convert TESW waveforms to photon counts");
    p->add_option("input", pul.input, "TESW waveform file")->required();
    p->add_option("--config", pul.config, "JSON config file");
    p->add_option("--out", pul.out_counts, "output counts CSV")->required();
    p->add_option("--peaks", pul.out_peaks, "output fitted-peak CSV");
    p->add_option("--max-peaks", pul.max_peaks, "maximum pulse-height classes");
    p->add_option("--photon-energy", pul.photon_energy, "photon energy in eV");
    p->add_option("--spacing", pul.spacing, "explicit peak spacing (energy scale)");
    p->add_option("--baseline-window", pul.baseline_window, "leading samples for baseline");
    p->add_option("--smooth-window", pul.smooth_window, "moving-average width (odd)");

    AnalyzeArgs ana;
    auto* an = app.add_subcommand("analyze", "Photon statistics report from a counts CSV");
    an->add_option("input", ana.input, "counts CSV")->required();
    an->add_option("--config", ana.config, "JSON config file");
    an->add_option("--out", ana.out_report, "output report JSON")->required();
    an->add_option("--eta", ana.eta, "assumed detection transmission");
    an->add_flag("--compensate", ana.compensate, "undo binomial loss (needs --eta)");
    an->add_option("--order", ana.order, "loss-compensation matrix order");
    an->add_option("--klyshko-max", ana.klyshko_max, "highest Klyshko index");
    an->add_option("--label", ana.label, "point label carried into the report");
    an->add_option("--raw-csv", ana.raw_csv, "write the raw distribution CSV");
    an->add_option("--compensated-csv", ana.compensated_csv, "write the compensated CSV");

    FitModesArgs fm;
    auto* f = app.add_subcommand("fit-modes", "Mode-structure inference from pump-variation data");
    f->add_option("reports", fm.reports, "analyze report JSONs (two or more)");
    f->add_option("--points", fm.points_csv, "correlation points CSV instead of reports");
    f->add_option("--config", fm.config, "JSON config file");
    f->add_option("--out", fm.out_report, "output report JSON")->required();
    f->add_option("--csv", fm.out_csv, "write the reconstructed mode table CSV");
    f->add_option("--K-max", fm.K_max, "number of ladder modes minus one");

    SpectrumArgs sp;
    auto* spc = app.add_subcommand("spectrum", "Joint spectral model: marginal and mode content");
    spc->add_option("--config", sp.config, "JSON config file (jsa_spectrum section)")->required();
    spc->add_option("--out", sp.out_csv, "output marginal spectrum CSV");
    spc->add_option("--schmidt", sp.schmidt_csv, "output Schmidt coefficient CSV");
    spc->add_option("--modes", sp.modes, "Schmidt modes kept in outputs");
    spc->add_option("--report", sp.report_path, "output report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (s->parsed()) {
            if (sim.out_counts.empty() && sim.out_waveforms.empty())
                throw io_error("simulate: nothing to write (give --out and/or --waveforms)");
            return run_simulate(sim);
        }
        if (p->parsed()) return run_pulse(pul);
        if (an->parsed()) return run_analyze(ana);
        if (f->parsed()) return run_fit_modes(fm);
        if (spc->parsed()) return run_spectrum(sp);
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}

}  // namespace sqz
