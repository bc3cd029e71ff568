#include "sqz/event_simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

constexpr std::uint64_t kChunk = 65536;
constexpr std::uint64_t kEventTag = 0x65766e74'73747231ull;  // "evntstr1"
constexpr std::uint64_t kWaveTag = 0x77617665'73747231ull;   // "wavestr1"

// splitmix64 finalizer; decorrelates nearby seeds.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t idx) {
    return mix64(seed ^ tag ^ (0x9E3779B97F4A7C15ull * (idx + 1)));
}

// mt19937_64 with hand-rolled variate transforms.  The standard library's
// distribution objects are implementation-defined, so uniforms and gaussians
// are derived explicitly to keep streams reproducible across toolchains.
class Stream {
public:
    explicit Stream(std::uint64_t s) : gen_(s) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), u1 < 1
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Per-mode inverse-CDF table over the even photon numbers.
struct ModeSampler {
    std::vector<double> cdf;  // cdf[j] = P(n <= 2j), last entry forced to 1

    int draw(Stream& st) const {
        const double u = st.uniform();
        for (std::size_t j = 0; j < cdf.size(); ++j)
            if (u < cdf[j]) return 2 * static_cast<int>(j);
        return 2 * (static_cast<int>(cdf.size()) - 1);
    }
};

std::vector<ModeSampler> build_samplers(const SqueezerSpec& source) {
    std::vector<ModeSampler> samplers;
    for (double r : source.r_list) {
        if (r == 0.0) continue;
        int cutoff = 2 * static_cast<int>(std::ceil(5.0 * std::max(1.0, r * r)));
        const auto d = single_mode_distribution(r, cutoff);
        ModeSampler s;
        double acc = 0.0;
        for (int n = 0; n <= cutoff; n += 2) {
            acc += d.probs[static_cast<std::size_t>(n)];
            s.cdf.push_back(acc);
        }
        s.cdf.back() = 1.0;  // absorb the truncated tail into the top bin
        samplers.push_back(std::move(s));
    }
    return samplers;
}

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.source.r_list.empty())
        throw domain_error("sample_events: source has no modes");
    if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0))
        throw domain_error("sample_events: eta must lie in [0, 1]");
    if (cfg.n_events == 0) throw domain_error("sample_events: need at least one event");
}

}  // namespace

std::vector<int> sample_events(const ExperimentConfig& cfg, int threads) {
    validate_common(cfg);
    if (threads < 1) throw domain_error("sample_events: thread count must be positive");
    const auto samplers = build_samplers(cfg.source);

    std::vector<int> out(cfg.n_events);
    const std::uint64_t nchunks = (cfg.n_events + kChunk - 1) / kChunk;
    const auto run_chunk = [&](std::uint64_t ci) {
        Stream st(substream_seed(cfg.seed, kEventTag, ci));
        const std::uint64_t lo = ci * kChunk;
        const std::uint64_t hi = std::min(cfg.n_events, lo + kChunk);
        for (std::uint64_t e = lo; e < hi; ++e) {
            int total = 0;
            for (const auto& s : samplers) total += s.draw(st);
            int det = 0;
            if (cfg.eta >= 1.0) {
                det = total;
            } else if (cfg.eta > 0.0) {
                for (int j = 0; j < total; ++j)
                    if (st.uniform() < cfg.eta) ++det;
            }
            out[e] = det;
        }
    };

    const int nworkers = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(threads), nchunks));
    if (nworkers <= 1) {
        for (std::uint64_t ci = 0; ci < nchunks; ++ci) run_chunk(ci);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        for (int t = 0; t < nworkers; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t ci = static_cast<std::uint64_t>(t); ci < nchunks;
                     ci += static_cast<std::uint64_t>(nworkers))
                    run_chunk(ci);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

CountHistogram sample_counts(const ExperimentConfig& cfg, int threads) {
    const auto events = sample_events(cfg, threads);
    int maxn = 0;
    for (int v : events) maxn = std::max(maxn, v);
    CountHistogram h;
    h.counts.assign(static_cast<std::size_t>(maxn) + 1, 0);
    for (int v : events) ++h.counts[static_cast<std::size_t>(v)];
    return h;
}

WaveformSet synthesize_waveforms(const std::vector<int>& counts_per_event,
                                 const ExperimentConfig& cfg) {
    const auto& w = cfg.waveform;
    if (counts_per_event.empty())
        throw domain_error("synthesize_waveforms: no events supplied");
    if (w.samples_per_record < 16)
        throw domain_error("synthesize_waveforms: record too short");
    if (w.pulse_start_sample < 0 || w.pulse_start_sample >= w.samples_per_record)
        throw domain_error("synthesize_waveforms: pulse start outside the record");
    if (!(w.rise_samples > 0.0) || !(w.decay_samples > 0.0))
        throw domain_error("synthesize_waveforms: rise and decay must be positive");
    if (!(w.photon_energy_ev > 0.0))
        throw domain_error("synthesize_waveforms: photon energy must be positive");
    if (w.resolution_fwhm_ev < 0.0 || w.baseline_noise_rms_ev < 0.0)
        throw domain_error("synthesize_waveforms: noise levels must be nonnegative");
    if (!(w.sample_interval_s > 0.0))
        throw domain_error("synthesize_waveforms: sample interval must be positive");
    for (int c : counts_per_event)
        if (c < 0) throw domain_error("synthesize_waveforms: negative photon count");

    // Double-exponential pulse template, unit peak on the sample grid.
    const int spr = w.samples_per_record;
    std::vector<double> shape(static_cast<std::size_t>(spr), 0.0);
    double peak = 0.0;
    for (int t = w.pulse_start_sample; t < spr; ++t) {
        const double u = static_cast<double>(t - w.pulse_start_sample);
        const double v = (1.0 - std::exp(-u / w.rise_samples)) * std::exp(-u / w.decay_samples);
        shape[static_cast<std::size_t>(t)] = v;
        peak = std::max(peak, v);
    }
    if (!(peak > 0.0))
        throw domain_error("synthesize_waveforms: pulse template vanished (start too late)");
    for (double& v : shape) v /= peak;

    const double sigma_e = w.resolution_fwhm_ev / 2.3548200450309493;  // FWHM -> rms

    WaveformSet set;
    set.samples_per_record = static_cast<std::uint32_t>(spr);
    set.sample_interval_s = w.sample_interval_s;
    set.samples.resize(counts_per_event.size() * static_cast<std::size_t>(spr));

    const std::uint64_t nrec = counts_per_event.size();
    const std::uint64_t nchunks = (nrec + kChunk - 1) / kChunk;
    for (std::uint64_t ci = 0; ci < nchunks; ++ci) {
        Stream st(substream_seed(cfg.seed, kWaveTag, ci));
        const std::uint64_t lo = ci * kChunk;
        const std::uint64_t hi = std::min(nrec, lo + kChunk);
        for (std::uint64_t rec = lo; rec < hi; ++rec) {
            double amp = counts_per_event[rec] * w.photon_energy_ev;
            if (sigma_e > 0.0) amp += sigma_e * st.gaussian();
            float* dst = set.samples.data() + rec * static_cast<std::uint64_t>(spr);
            for (int t = 0; t < spr; ++t) {
                double v = amp * shape[static_cast<std::size_t>(t)];
                if (w.baseline_noise_rms_ev > 0.0)
                    v += w.baseline_noise_rms_ev * st.gaussian();
                dst[t] = static_cast<float>(v);
            }
        }
    }
    return set;
}

namespace {

void put_u16(std::string& b, std::uint16_t v) {
    b.push_back(static_cast<char>(v & 0xff));
    b.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

void write_tesw(const WaveformSet& w, const std::string& path) {
    if (w.samples_per_record == 0 || w.samples.size() % w.samples_per_record != 0)
        throw domain_error("write_tesw: inconsistent record length");
    const std::uint64_t nrec = w.n_records();
    if (nrec > 0xffffffffull) throw domain_error("write_tesw: too many records");

    std::string header = "TESW";
    put_u16(header, 1);
    put_u32(header, static_cast<std::uint32_t>(nrec));
    put_u32(header, w.samples_per_record);
    std::uint64_t bits;
    std::memcpy(&bits, &w.sample_interval_s, sizeof bits);
    put_u64(header, bits);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("write_tesw: cannot open " + path);
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    if constexpr (std::endian::native == std::endian::little) {
        f.write(reinterpret_cast<const char*>(w.samples.data()),
                static_cast<std::streamsize>(w.samples.size() * sizeof(float)));
    } else {
        std::string buf;
        buf.reserve(w.samples.size() * 4);
        for (float v : w.samples) {
            std::uint32_t u;
            std::memcpy(&u, &v, sizeof u);
            put_u32(buf, u);
        }
        f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!f) throw io_error("write_tesw: write failed for " + path);
}

WaveformSet read_tesw(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("read_tesw: cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 22) throw io_error("read_tesw: truncated header in " + path);
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    if (std::memcmp(p, "TESW", 4) != 0)
        throw io_error("read_tesw: bad magic in " + path);
    const std::uint16_t version = get_u16(p + 4);
    if (version != 1)
        throw io_error("read_tesw: unsupported version " + std::to_string(version));
    const std::uint32_t nrec = get_u32(p + 6);
    const std::uint32_t spr = get_u32(p + 10);
    const std::uint64_t bits = get_u64(p + 14);

    WaveformSet w;
    w.samples_per_record = spr;
    std::memcpy(&w.sample_interval_s, &bits, sizeof bits);
    const std::uint64_t want = static_cast<std::uint64_t>(nrec) * spr;
    if (data.size() != 22 + want * 4)
        throw io_error("read_tesw: payload size mismatch in " + path);
    w.samples.resize(want);
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(w.samples.data(), p + 22, want * 4);
    } else {
        for (std::uint64_t i = 0; i < want; ++i) {
            const std::uint32_t u = get_u32(p + 22 + i * 4);
            std::memcpy(&w.samples[i], &u, 4);
        }
    }
    return w;
}

}  // namespace sqz
