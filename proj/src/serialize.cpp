#include "sqz/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqz/errors.hpp"

namespace sqz {

using nlohmann::json;

// --- files -------------------------------------------------------------------

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open " + path);
    try {
        json j;
        f >> j;
        return j;
    } catch (const json::exception& e) {
        throw io_error(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw io_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// --- canonical serialization ---------------------------------------------------

static void format_double(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
    // keep a numeric token (snprintf may emit a bare integer, which is fine)
}

static void canonical_emit(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann sorts keys
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                canonical_emit(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                canonical_emit(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
            format_double(out, j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

std::string canonical_json(const json& j) {
    std::string out;
    canonical_emit(j, out);
    out += '\n';
    return out;
}

std::string config_hash_hex(const json& j) {
    const std::string s = canonical_json(j);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- helpers -------------------------------------------------------------------

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw io_error(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok) throw io_error(where + ": unknown key \"" + it.key() + "\"");
    }
}

double get_num(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw io_error(where + ": missing \"" + key + "\"");
    if (!j[key].is_number()) throw io_error(where + ": \"" + key + "\" must be a number");
    return j[key].get<double>();
}

double get_num_or(const json& j, const char* key, double def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) throw io_error(where + ": \"" + key + "\" must be a number");
    return j[key].get<double>();
}

int get_int_or(const json& j, const char* key, int def, const std::string& where) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer()) throw io_error(where + ": \"" + key + "\" must be an integer");
    return j[key].get<int>();
}

}  // namespace

// --- JSON views ------------------------------------------------------------------

json to_json(const ValueWithSigma& v) {
    return json{{"value", v.value}, {"sigma", v.sigma}};
}

json to_json(const PhotonDistribution& d) {
    json j{{"probs", d.probs}, {"sigmas", d.sigmas}, {"compensated", d.compensated}};
    if (d.total_events) j["total_events"] = *d.total_events;
    return j;
}

SqueezerSpec squeezer_from_json(const json& section) {
    const std::string where = "squeezer_model";
    check_keys(section, {"mu", "B", "K_max", "r_list"}, where);
    if (section.contains("r_list")) {
        if (section.contains("mu") || section.contains("B") || section.contains("K_max"))
            throw io_error(where + ": give either r_list or the thermal parameters, not both");
        if (!section["r_list"].is_array())
            throw io_error(where + ": \"r_list\" must be an array of numbers");
        std::vector<double> r;
        for (const auto& v : section["r_list"]) {
            if (!v.is_number()) throw io_error(where + ": \"r_list\" must be numeric");
            r.push_back(v.get<double>());
        }
        return SqueezerSpec::from_modes(std::move(r));
    }
    const double mu = get_num(section, "mu", where);
    const double B = get_num(section, "B", where);
    const int K_max = get_int_or(section, "K_max", 40, where);
    return SqueezerSpec::from_thermal(mu, B, K_max);
}

json to_json(const SqueezerSpec& s) {
    if (s.thermal) return json{{"mu", s.mu}, {"B", s.B}, {"K_max", s.K_max}};
    return json{{"r_list", s.r_list}};
}

WaveformOptions waveform_from_json(const json& section) {
    const std::string where = "event_simulator.waveform";
    check_keys(section,
               {"samples_per_record", "sample_interval_s", "photon_energy_ev",
                "resolution_fwhm_ev", "baseline_noise_rms_ev", "pulse_start_sample",
                "rise_samples", "decay_samples"},
               where);
    WaveformOptions w;
    w.samples_per_record = get_int_or(section, "samples_per_record", w.samples_per_record, where);
    w.sample_interval_s = get_num_or(section, "sample_interval_s", w.sample_interval_s, where);
    w.photon_energy_ev = get_num_or(section, "photon_energy_ev", w.photon_energy_ev, where);
    w.resolution_fwhm_ev = get_num_or(section, "resolution_fwhm_ev", w.resolution_fwhm_ev, where);
    w.baseline_noise_rms_ev =
        get_num_or(section, "baseline_noise_rms_ev", w.baseline_noise_rms_ev, where);
    w.pulse_start_sample = get_int_or(section, "pulse_start_sample", w.pulse_start_sample, where);
    w.rise_samples = get_num_or(section, "rise_samples", w.rise_samples, where);
    w.decay_samples = get_num_or(section, "decay_samples", w.decay_samples, where);
    return w;
}

json to_json(const WaveformOptions& w) {
    return json{{"samples_per_record", w.samples_per_record},
                {"sample_interval_s", w.sample_interval_s},
                {"photon_energy_ev", w.photon_energy_ev},
                {"resolution_fwhm_ev", w.resolution_fwhm_ev},
                {"baseline_noise_rms_ev", w.baseline_noise_rms_ev},
                {"pulse_start_sample", w.pulse_start_sample},
                {"rise_samples", w.rise_samples},
                {"decay_samples", w.decay_samples}};
}

SellmeierCoefficients sellmeier_from_json(const json& section) {
    const std::string where = "jsa_spectrum.sellmeier";
    check_keys(section, {"constant", "terms", "quadratic_um2", "valid_nm", "notes"}, where);
    SellmeierCoefficients c;
    c.constant = get_num(section, "constant", where);
    c.quadratic_um2 = get_num_or(section, "quadratic_um2", 0.0, where);
    if (section.contains("terms")) {
        if (!section["terms"].is_array()) throw io_error(where + ": \"terms\" must be an array");
        for (const auto& t : section["terms"]) {
            check_keys(t, {"strength", "resonance_um2"}, where + ".terms");
            c.terms.push_back({get_num(t, "strength", where), get_num(t, "resonance_um2", where)});
        }
    }
    if (!section.contains("valid_nm") || !section["valid_nm"].is_array() ||
        section["valid_nm"].size() != 2)
        throw io_error(where + ": \"valid_nm\" must be [min, max]");
    c.lambda_min_nm = section["valid_nm"][0].get<double>();
    c.lambda_max_nm = section["valid_nm"][1].get<double>();
    if (!(c.lambda_min_nm > 0.0) || !(c.lambda_max_nm > c.lambda_min_nm))
        throw io_error(where + ": invalid validity window");
    return c;
}

CrystalSpec crystal_from_json(const json& section) {
    const std::string where = "jsa_spectrum.crystal";
    check_keys(section, {"length_mm", "poling_period_um", "degeneracy_nm"}, where);
    CrystalSpec c;
    c.length_m = get_num(section, "length_mm", where) * 1e-3;
    c.poling_period_m = get_num(section, "poling_period_um", where) * 1e-6;
    c.degeneracy_nm = get_num(section, "degeneracy_nm", where);
    return c;
}

PumpSpec pump_from_json(const json& section) {
    const std::string where = "jsa_spectrum.pump";
    check_keys(section, {"center_nm", "sigma_omega_rad_s"}, where);
    PumpSpec p;
    p.center_nm = get_num(section, "center_nm", where);
    p.sigma_omega = get_num(section, "sigma_omega_rad_s", where);
    return p;
}

FrequencyGrid grid_from_json(const json& section) {
    const std::string where = "jsa_spectrum.grid";
    check_keys(section, {"lambda_min_nm", "lambda_max_nm", "points"}, where);
    const double lo = get_num(section, "lambda_min_nm", where);
    const double hi = get_num(section, "lambda_max_nm", where);
    const int n = get_int_or(section, "points", 512, where);
    try {
        return FrequencyGrid::from_wavelengths(lo, hi, n);
    } catch (const domain_error& e) {
        throw io_error(where + ": " + e.what());
    }
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw io_error(where + ": bad number \"" + s + "\"");
    }
}

}  // namespace

void write_counts_csv(const CountHistogram& h, const std::string& path) {
    std::string out = "n,count\n";
    for (std::size_t n = 0; n < h.counts.size(); ++n)
        out += std::to_string(n) + "," + std::to_string(h.counts[n]) + "\n";
    write_text_file(path, out);
}

CountHistogram read_counts_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"n", "count"})
        throw io_error(path + ": expected header \"n,count\"");
    CountHistogram h;
    std::vector<bool> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw io_error(path + ":" + std::to_string(lineno) + ": expected two columns");
        const long n = std::lround(parse_double(cells[0], path));
        const double cd = parse_double(cells[1], path);
        if (n < 0 || cd < 0 || cd != std::floor(cd))
            throw io_error(path + ":" + std::to_string(lineno) + ": counts must be nonnegative integers");
        if (static_cast<std::size_t>(n) >= h.counts.size()) {
            h.counts.resize(static_cast<std::size_t>(n) + 1, 0);
            seen.resize(static_cast<std::size_t>(n) + 1, false);
        }
        if (seen[static_cast<std::size_t>(n)])
            throw io_error(path + ":" + std::to_string(lineno) + ": duplicate bin");
        seen[static_cast<std::size_t>(n)] = true;
        h.counts[static_cast<std::size_t>(n)] = static_cast<std::uint64_t>(cd);
    }
    if (h.counts.empty()) throw io_error(path + ": no data rows");
    return h;
}

void write_distribution_csv(const PhotonDistribution& d, const std::string& path) {
    std::string out = "n,p,sigma\n";
    for (int n = 0; n <= d.cutoff(); ++n)
        out += std::to_string(n) + "," + num(d.probs[static_cast<std::size_t>(n)]) + "," +
               num(d.sigmas[static_cast<std::size_t>(n)]) + "\n";
    write_text_file(path, out);
}

void write_spectrum_csv(const MarginalSpectrum& s, const std::string& path) {
    std::string out = "wavelength_nm,intensity\n";
    for (std::size_t i = 0; i < s.wavelength_nm.size(); ++i)
        out += num(s.wavelength_nm[i]) + "," + num(s.intensity[i]) + "\n";
    write_text_file(path, out);
}

void write_schmidt_csv(const std::vector<double>& lambdas, const std::string& path) {
    std::string out = "k,lambda\n";
    for (std::size_t k = 0; k < lambdas.size(); ++k)
        out += std::to_string(k) + "," + num(lambdas[k]) + "\n";
    write_text_file(path, out);
}

void write_peaks_csv(const std::vector<GaussianPeak>& peaks, const std::string& path) {
    std::string out = "index,center,sigma,weight\n";
    for (std::size_t i = 0; i < peaks.size(); ++i)
        out += std::to_string(i) + "," + num(peaks[i].center) + "," + num(peaks[i].sigma) +
               "," + num(peaks[i].weight) + "\n";
    write_text_file(path, out);
}

void write_reconstruction_csv(const ModeReconstruction& rec, const std::string& path) {
    std::string out = "k,lambda";
    for (const auto& label : rec.labels) out += ",r_" + label;
    out += "\n";
    for (std::size_t k = 0; k < rec.lambda.size(); ++k) {
        out += std::to_string(k) + "," + num(rec.lambda[k]);
        for (const auto& row : rec.r_matrix) out += "," + num(row[k]);
        out += "\n";
    }
    write_text_file(path, out);
}

std::vector<CorrelationPoint> read_points_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) !=
            std::vector<std::string>{"label", "g2", "sigma_g2", "g3", "sigma_g3"})
        throw io_error(path + ": expected header \"label,g2,sigma_g2,g3,sigma_g3\"");
    std::vector<CorrelationPoint> pts;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 5)
            throw io_error(path + ":" + std::to_string(lineno) + ": expected five columns");
        CorrelationPoint p;
        p.label = cells[0];
        p.g2 = parse_double(cells[1], path);
        p.sigma_g2 = parse_double(cells[2], path);
        p.g3 = parse_double(cells[3], path);
        p.sigma_g3 = parse_double(cells[4], path);
        pts.push_back(std::move(p));
    }
    if (pts.empty()) throw io_error(path + ": no data rows");
    return pts;
}

void write_points_csv(const std::vector<CorrelationPoint>& pts, const std::string& path) {
    std::string out = "label,g2,sigma_g2,g3,sigma_g3\n";
    for (const auto& p : pts)
        out += p.label + "," + num(p.g2) + "," + num(p.sigma_g2) + "," + num(p.g3) + "," +
               num(p.sigma_g3) + "\n";
    write_text_file(path, out);
}

}  // namespace sqz
