#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "sqz/errors.hpp"
#include "sqz/serialize.hpp"

using namespace sqz;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* stem) : path(std::string("sertest_") + stem) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("canonical serialization is key-sorted and stable") {
    json a{{"zeta", 1}, {"alpha", 2}, {"mid", json{{"b", 1}, {"a", 2}}}};
    json b{{"mid", json{{"a", 2}, {"b", 1}}}, {"alpha", 2}, {"zeta", 1}};
    const auto sa = canonical_json(a);
    CHECK(sa == canonical_json(b));
    CHECK(sa.find("\"alpha\"") < sa.find("\"mid\""));
    CHECK(sa.find("\"mid\"") < sa.find("\"zeta\""));
    CHECK(sa.back() == '\n');
    CHECK(config_hash_hex(a) == config_hash_hex(b));
    CHECK(config_hash_hex(a).size() == 16);
    CHECK(config_hash_hex(a) != config_hash_hex(json{{"alpha", 3}}));
}

TEST_CASE("canonical doubles use %.12g and map non-finite to null") {
    json j;
    j["x"] = 0.1;
    j["y"] = std::numeric_limits<double>::quiet_NaN();
    j["z"] = std::numeric_limits<double>::infinity();
    j["n"] = 1.0;
    const auto s = canonical_json(j);
    CHECK(s.find("0.1") != std::string::npos);
    CHECK(s.find("nan") == std::string::npos);
    CHECK(s.find("inf") == std::string::npos);
    CHECK(s.find("\"y\":null") != std::string::npos);
    CHECK(s.find("\"z\":null") != std::string::npos);
    // Integral doubles print without an exponent or spurious digits.
    CHECK(s.find("\"n\":1") != std::string::npos);
}

TEST_CASE("text files round-trip") {
    TempFile f("text.txt");
    write_text_file(f.path, "line1\nline2\n");
    CHECK(read_text_file(f.path) == "line1\nline2\n");
    CHECK_THROWS_AS(read_text_file("missing_file.txt"), io_error);
    CHECK_THROWS_AS(load_json_file("missing_file.json"), io_error);
    TempFile g("bad.json");
    write_text_file(g.path, "{not json");
    CHECK_THROWS_AS(load_json_file(g.path), io_error);
}

TEST_CASE("value-with-sigma and distribution views") {
    const ValueWithSigma v{1.5, 0.25};
    const auto jv = to_json(v);
    CHECK(jv["value"].get<double>() == 1.5);
    CHECK(jv["sigma"].get<double>() == 0.25);

    PhotonDistribution d;
    d.probs = {0.5, 0.3, 0.2};
    d.sigmas = {0.01, 0.02, 0.03};
    const auto jd = to_json(d);
    CHECK(jd["probs"].size() == 3);
    CHECK(jd["sigmas"].size() == 3);
    CHECK(jd["probs"][1].get<double>() == 0.3);
}

TEST_CASE("squeezer config accepts either explicit gains or a thermal ladder") {
    const auto s1 = squeezer_from_json(json::parse(R"({"r_list": [0.3, 0.1]})"));
    REQUIRE(s1.r_list.size() == 2);
    CHECK_FALSE(s1.thermal);
    CHECK(s1.r_list[0] == 0.3);

    const auto s2 = squeezer_from_json(json::parse(R"({"mu": 0.9, "B": 0.2, "K_max": 12})"));
    CHECK(s2.thermal);
    CHECK(s2.mu == 0.9);
    CHECK(s2.B == 0.2);
    CHECK(s2.K_max == 12);

    // K_max defaults when omitted.
    const auto s3 = squeezer_from_json(json::parse(R"({"mu": 0.9, "B": 0.2})"));
    CHECK(s3.K_max == 40);

    // Mixing the two parameterizations or renaming keys fails.
    CHECK_THROWS_AS(squeezer_from_json(json::parse(R"({"r_list": [0.1], "mu": 0.5, "B": 0.1})")),
                    io_error);
    CHECK_THROWS_AS(squeezer_from_json(json::parse(R"({"mu": 0.9})")), io_error);
    CHECK_THROWS_AS(squeezer_from_json(json::parse(R"({"r_lst": [0.1]})")), io_error);
    CHECK_THROWS_AS(squeezer_from_json(json::parse(R"({})")), io_error);

    // Round trip through the JSON view.
    const auto back = squeezer_from_json(to_json(s2));
    CHECK(back.mu == s2.mu);
    CHECK(back.B == s2.B);
    CHECK(back.K_max == s2.K_max);
}

TEST_CASE("waveform config round-trips and rejects typos") {
    WaveformOptions w;
    w.samples_per_record = 640;
    w.photon_energy_ev = 0.77;
    const auto back = waveform_from_json(to_json(w));
    CHECK(back.samples_per_record == 640);
    CHECK(back.photon_energy_ev == 0.77);
    CHECK(back.decay_samples == w.decay_samples);
    CHECK_THROWS_AS(waveform_from_json(json::parse(R"({"samples": 10})")), io_error);
}

TEST_CASE("optical config sections parse and validate") {
    const auto sell = sellmeier_from_json(json::parse(R"({
        "constant": 2.12725,
        "terms": [{"strength": 1.18431, "resonance_um2": 0.0514852},
                  {"strength": 0.6603, "resonance_um2": 100.00507}],
        "quadratic_um2": 0.00968956,
        "valid_nm": [500.0, 3500.0],
        "notes": "z axis"})"));
    CHECK(sell.terms.size() == 2);
    CHECK(sell.lambda_min_nm == 500.0);
    CHECK_THROWS_AS(sellmeier_from_json(json::parse(R"({"constant": 2.0})")), io_error);
    CHECK_THROWS_AS(sellmeier_from_json(json::parse(R"({
        "constant": 2.0, "terms": [], "quadratic_um2": 0.0,
        "valid_nm": [3500.0, 500.0]})")), io_error);

    const auto cr = crystal_from_json(json::parse(
        R"({"length_mm": 10.0, "poling_period_um": 24.2, "degeneracy_nm": 1535.0})"));
    CHECK(cr.length_m == doctest::Approx(0.010));
    CHECK(cr.poling_period_m == doctest::Approx(24.2e-6));
    CHECK_THROWS_AS(crystal_from_json(json::parse(R"({"length_mm": 10.0})")), io_error);

    const auto pm = pump_from_json(json::parse(
        R"({"center_nm": 767.5, "sigma_omega_rad_s": 4.0e11})"));
    CHECK(pm.center_nm == 767.5);
    CHECK(pm.sigma_omega == 4.0e11);

    const auto gr = grid_from_json(json::parse(
        R"({"lambda_min_nm": 1300.0, "lambda_max_nm": 1800.0, "points": 256})"));
    CHECK(gr.n == 256);
    CHECK(gr.omega_min < gr.omega_max);
    CHECK_THROWS_AS(grid_from_json(json::parse(
        R"({"lambda_min_nm": 1800.0, "lambda_max_nm": 1300.0, "points": 256})")), io_error);
}

TEST_CASE("count histograms round-trip through CSV") {
    CountHistogram h;
    h.counts = {99000, 0, 800, 0, 0, 7};
    TempFile f("counts.csv");
    write_counts_csv(h, f.path);
    const auto r = read_counts_csv(f.path);
    CHECK(r.counts == h.counts);

    // Sparse files fill gaps with zeros.
    write_text_file(f.path, "n,count\n0,10\n3,2\n");
    const auto sparse = read_counts_csv(f.path);
    REQUIRE(sparse.counts.size() == 4);
    CHECK(sparse.counts[0] == 10);
    CHECK(sparse.counts[1] == 0);
    CHECK(sparse.counts[3] == 2);

    write_text_file(f.path, "n,count\n0,10\n0,2\n");
    CHECK_THROWS_AS(read_counts_csv(f.path), io_error);
    write_text_file(f.path, "n,count\n0,-3\n");
    CHECK_THROWS_AS(read_counts_csv(f.path), io_error);
    write_text_file(f.path, "n,count\n0,1.5\n");
    CHECK_THROWS_AS(read_counts_csv(f.path), io_error);
    write_text_file(f.path, "bogus header\n0,1\n");
    CHECK_THROWS_AS(read_counts_csv(f.path), io_error);
    write_text_file(f.path, "n,count\n");
    CHECK_THROWS_AS(read_counts_csv(f.path), io_error);
}

TEST_CASE("correlation points round-trip through CSV") {
    std::vector<CorrelationPoint> pts;
    pts.push_back({5.2, 0.1, 24.0, 1.2, "run_a"});
    pts.push_back({7.7, 0.2, 48.5, 2.5, "run_b"});
    TempFile f("points.csv");
    write_points_csv(pts, f.path);
    const auto r = read_points_csv(f.path);
    REQUIRE(r.size() == 2);
    CHECK(r[0].label == "run_a");
    CHECK(r[0].g2 == doctest::Approx(5.2));
    CHECK(r[1].sigma_g3 == doctest::Approx(2.5));

    write_text_file(f.path, "label,g2,sigma_g2,g3,sigma_g3\nrun,1.0,0.1,2.0\n");
    CHECK_THROWS_AS(read_points_csv(f.path), io_error);
    write_text_file(f.path, "label,g2,sigma_g2,g3,sigma_g3\nrun,abc,0.1,2.0,0.3\n");
    CHECK_THROWS_AS(read_points_csv(f.path), io_error);
}

TEST_CASE("analysis product CSV writers emit well-formed tables") {
    TempFile f("out.csv");

    PhotonDistribution d;
    d.probs = {0.9, 0.1};
    d.sigmas = {0.001, 0.001};
    write_distribution_csv(d, f.path);
    auto text = read_text_file(f.path);
    CHECK(text.rfind("n,p,sigma\n", 0) == 0);

    write_schmidt_csv({0.5, 0.3, 0.2}, f.path);
    text = read_text_file(f.path);
    CHECK(text.rfind("k,lambda\n", 0) == 0);
    CHECK(text.find("\n0,0.5\n") != std::string::npos);

    std::vector<GaussianPeak> peaks{{0.0, 0.08, 0.7}, {0.8, 0.09, 0.3}};
    write_peaks_csv(peaks, f.path);
    text = read_text_file(f.path);
    CHECK(text.rfind("index,center,sigma,weight\n", 0) == 0);
}
