#include "sqz/pulse_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

constexpr double kFwhm = 2.3548200450309493;  // 2 sqrt(2 ln 2)

// Centered moving average; the window shrinks symmetrically at the edges.
void smooth_into(const double* src, double* dst, int n, int window) {
    const int half = window / 2;
    double acc = 0.0;
    int lo = 0, hi = -1;  // current inclusive window [lo, hi]
    for (int i = 0; i < n; ++i) {
        int wlo = std::max(0, i - half);
        int whi = std::min(n - 1, i + half);
        // keep the window symmetric around i near the edges
        const int reach = std::min(i - wlo, whi - i);
        wlo = i - reach;
        whi = i + reach;
        while (hi < whi) acc += src[++hi];
        while (lo < wlo) acc -= src[lo++];
        while (hi > whi) acc -= src[hi--];
        while (lo > wlo) acc += src[--lo];
        dst[i] = acc / (whi - wlo + 1);
    }
}

double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * (static_cast<double>(s.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= s.size()) return s.back();
    const double frac = pos - static_cast<double>(lo);
    return s[lo] * (1.0 - frac) + s[lo + 1] * frac;
}

struct Histogram {
    double x0 = 0.0;      // left edge
    double width = 0.0;   // bin width
    std::vector<double> counts;

    double center(int i) const { return x0 + (i + 0.5) * width; }
};

Histogram make_histogram(const std::vector<double>& heights) {
    const auto [mn_it, mx_it] = std::minmax_element(heights.begin(), heights.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) throw domain_error("fit_peaks: all heights identical");

    std::vector<double> sorted = heights;
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double n13 = std::cbrt(static_cast<double>(heights.size()));
    double bw = 2.0 * iqr / n13;  // Freedman-Diaconis
    int nbins;
    if (bw > 0.0) {
        nbins = static_cast<int>(std::ceil((mx - mn) / bw));
        nbins = std::clamp(nbins, 16, 4096);
    } else {
        nbins = 64;
    }

    Histogram h;
    h.x0 = mn;
    h.width = (mx - mn) / nbins * (1.0 + 1e-12);  // keep the max inside the top bin
    h.counts.assign(static_cast<std::size_t>(nbins), 0.0);
    for (double v : heights) {
        auto i = static_cast<long>((v - h.x0) / h.width);
        i = std::clamp<long>(i, 0, nbins - 1);
        h.counts[static_cast<std::size_t>(i)] += 1.0;
    }
    return h;
}

// Weighted parabola through (x, ln c) — the linearized Gaussian fit.  Returns
// false when the data do not bend downward.
bool log_parabola(const std::vector<double>& x, const std::vector<double>& c,
                  double& center, double& sigma, double& amplitude) {
    double sw = 0, sx = 0, sx2 = 0, sx3 = 0, sx4 = 0, sy = 0, sxy = 0, sx2y = 0;
    double xbar = 0, wsum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xbar += c[i] * x[i];
        wsum += c[i];
    }
    if (!(wsum > 0.0)) return false;
    xbar /= wsum;
    int used = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(c[i] > 0.0)) continue;
        ++used;
        const double t = x[i] - xbar;
        const double w = c[i];  // counts weight the log-linearized residuals
        const double y = std::log(c[i]);
        sw += w;
        sx += w * t;
        sx2 += w * t * t;
        sx3 += w * t * t * t;
        sx4 += w * t * t * t * t;
        sy += w * y;
        sxy += w * t * y;
        sx2y += w * t * t * y;
    }
    if (used < 4) return false;

    // Normal equations for y = a + b t + c2 t^2 (3x3 Cramer).
    const double m[3][3] = {{sw, sx, sx2}, {sx, sx2, sx3}, {sx2, sx3, sx4}};
    const double r[3] = {sy, sxy, sx2y};
    auto det3 = [](const double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double d = det3(m);
    if (d == 0.0) return false;
    double sol[3];
    for (int k = 0; k < 3; ++k) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t[i][j] = (j == k) ? r[i] : m[i][j];
        sol[k] = det3(t) / d;
    }
    const double a = sol[0], b = sol[1], c2 = sol[2];
    if (!(c2 < 0.0)) return false;
    sigma = std::sqrt(-0.5 / c2);
    center = xbar - b / (2.0 * c2);
    amplitude = std::exp(a - b * b / (4.0 * c2));
    return std::isfinite(sigma) && std::isfinite(center) && std::isfinite(amplitude);
}

}  // namespace

std::vector<double> extract_heights(const WaveformSet& w,
                                    const HeightExtractionOptions& opts) {
    const int spr = static_cast<int>(w.samples_per_record);
    if (spr == 0 || w.n_records() == 0)
        throw domain_error("extract_heights: empty waveform set");
    if (opts.baseline_window < 1 || opts.baseline_window >= spr)
        throw domain_error("extract_heights: baseline window does not fit the record");
    if (opts.smooth_window < 1 || opts.smooth_window % 2 == 0)
        throw domain_error("extract_heights: smoothing window must be odd and positive");

    std::vector<double> heights(w.n_records());
    std::vector<double> buf(static_cast<std::size_t>(spr));
    std::vector<double> sm(static_cast<std::size_t>(spr));
    for (std::size_t rec = 0; rec < w.n_records(); ++rec) {
        const float* src = w.samples.data() + rec * static_cast<std::size_t>(spr);
        double base = 0.0;
        for (int i = 0; i < opts.baseline_window; ++i) base += src[i];
        base /= opts.baseline_window;
        for (int i = 0; i < spr; ++i) buf[static_cast<std::size_t>(i)] = src[i] - base;
        smooth_into(buf.data(), sm.data(), spr, opts.smooth_window);
        double best = 0.0;
        for (int i = 0; i < spr; ++i)
            if (std::abs(sm[static_cast<std::size_t>(i)]) > std::abs(best))
                best = sm[static_cast<std::size_t>(i)];
        heights[rec] = best;
    }
    return heights;
}

std::vector<GaussianPeak> fit_peaks(const std::vector<double>& heights,
                                    int expected_max_peaks) {
    if (heights.size() < 1000)
        throw domain_error("fit_peaks: need at least 1000 heights");
    if (expected_max_peaks < 1)
        throw domain_error("fit_peaks: expected_max_peaks must be positive");

    const Histogram h = make_histogram(heights);
    const int nb = static_cast<int>(h.counts.size());
    std::vector<double> sm(h.counts.size());
    smooth_into(h.counts.data(), sm.data(), nb, 5);
    const double smmax = *std::max_element(sm.begin(), sm.end());

    // Interior local maxima filtered by absolute height and by prominence:
    // the saddle toward the nearest higher terrain must fall below half the
    // candidate height.
    struct Candidate {
        int bin;
        double height;
    };
    std::vector<Candidate> cands;
    for (int i = 1; i + 1 < nb; ++i) {
        const double v = sm[static_cast<std::size_t>(i)];
        if (!(v > sm[static_cast<std::size_t>(i - 1)]) ||
            !(v >= sm[static_cast<std::size_t>(i + 1)]))
            continue;
        if (v < 0.01 * smmax) continue;
        auto side_min = [&](int dir) {
            double m = v;
            for (int j = i + dir; j >= 0 && j < nb; j += dir) {
                if (sm[static_cast<std::size_t>(j)] > v) return m;
                m = std::min(m, sm[static_cast<std::size_t>(j)]);
            }
            return m;
        };
        const double saddle = std::max(side_min(-1), side_min(+1));
        if (saddle > 0.5 * v) continue;
        cands.push_back({i, v});
    }
    if (cands.empty()) throw domain_error("fit_peaks: no pulse-height classes found");

    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.height > b.height; });
    if (static_cast<int>(cands.size()) > expected_max_peaks)
        cands.resize(static_cast<std::size_t>(expected_max_peaks));
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.bin < b.bin; });

    const double total = static_cast<double>(heights.size());
    std::vector<GaussianPeak> peaks;
    for (const auto& cand : cands) {
        // Seed width from the half-height extent of the smoothed histogram.
        const double ph = sm[static_cast<std::size_t>(cand.bin)];
        int l = cand.bin, r = cand.bin;
        while (l > 0 && sm[static_cast<std::size_t>(l)] > 0.5 * ph) --l;
        while (r + 1 < nb && sm[static_cast<std::size_t>(r)] > 0.5 * ph) ++r;
        double center = h.center(cand.bin);
        double sigma = std::max(1.0, (r - l) / kFwhm) * h.width;
        double amplitude = 0.0;

        bool ok = false;
        for (int pass = 0; pass < 2; ++pass) {
            const int half = std::max(2, static_cast<int>(std::ceil(2.0 * sigma / h.width)));
            const int c0 = static_cast<int>(std::floor((center - h.x0) / h.width));
            const int lo = std::max(0, c0 - half);
            const int hi = std::min(nb - 1, c0 + half);
            std::vector<double> xs, cs;
            for (int i = lo; i <= hi; ++i) {
                xs.push_back(h.center(i));
                cs.push_back(h.counts[static_cast<std::size_t>(i)]);
            }
            ok = log_parabola(xs, cs, center, sigma, amplitude);
            if (!ok) break;
        }
        if (!ok) continue;  // degenerate class; drop it
        GaussianPeak p;
        p.center = center;
        p.sigma = sigma;
        p.weight = amplitude * sigma * std::sqrt(2.0 * 3.14159265358979323846) /
                   (h.width * total);
        peaks.push_back(p);
    }
    if (peaks.empty()) throw domain_error("fit_peaks: no pulse-height classes survived fitting");
    std::sort(peaks.begin(), peaks.end(),
              [](const GaussianPeak& a, const GaussianPeak& b) { return a.center < b.center; });

    for (std::size_t i = 1; i < peaks.size(); ++i) {
        const double sep = peaks[i].center - peaks[i - 1].center;
        if (sep < 2.0 * std::max(peaks[i].sigma, peaks[i - 1].sigma))
            throw domain_error("fit_peaks: overlapping pulse-height classes are unresolved");
    }
    return peaks;
}

int ThresholdSet::assign(double height) const {
    int i = 0;
    while (i < static_cast<int>(boundaries.size()) &&
           height >= boundaries[static_cast<std::size_t>(i)])
        ++i;
    return i;
}

CountAssignment assign_counts(const std::vector<double>& heights,
                              const std::vector<GaussianPeak>& peaks,
                              double photon_energy_ev,
                              std::optional<double> explicit_spacing) {
    if (peaks.empty()) throw domain_error("assign_counts: no peaks supplied");
    for (std::size_t i = 1; i < peaks.size(); ++i)
        if (!(peaks[i].center > peaks[i - 1].center))
            throw domain_error("assign_counts: peaks must be sorted by center");
    if (!(photon_energy_ev > 0.0))
        throw domain_error("assign_counts: photon energy must be positive");

    double spacing;
    if (explicit_spacing) {
        if (!(*explicit_spacing > 0.0))
            throw domain_error("assign_counts: explicit spacing must be positive");
        spacing = *explicit_spacing;
    } else if (peaks.size() >= 2) {
        spacing = (peaks.back().center - peaks.front().center) /
                  static_cast<double>(peaks.size() - 1);
    } else {
        throw domain_error("assign_counts: single peak needs an explicit energy scale");
    }

    CountAssignment out;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        const auto& a = peaks[i - 1];
        const auto& b = peaks[i];
        double boundary = 0.5 * (a.center + b.center);
        if (a.sigma > 0.0 && b.sigma > 0.0 && a.weight > 0.0 && b.weight > 0.0) {
            // Equal scaled-density point: solve
            // ln(wa/sa) - (x-ca)^2/(2 sa^2) = ln(wb/sb) - (x-cb)^2/(2 sb^2).
            const double ia = 1.0 / (a.sigma * a.sigma);
            const double ib = 1.0 / (b.sigma * b.sigma);
            const double qa = 0.5 * (ib - ia);
            const double qb = a.center * ia - b.center * ib;
            const double qc = 0.5 * (b.center * b.center * ib - a.center * a.center * ia) +
                              std::log((a.weight * b.sigma) / (b.weight * a.sigma));
            if (std::abs(qa) < 1e-12 * std::max(ia, ib)) {
                if (std::abs(qb) > 0.0) {
                    const double x = -qc / qb;
                    if (x > a.center && x < b.center) boundary = x;
                }
            } else {
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    for (double x : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)}) {
                        if (x > a.center && x < b.center) {
                            boundary = x;
                            break;
                        }
                    }
                }
            }
        }
        out.thresholds.boundaries.push_back(boundary);
    }

    out.histogram.counts.assign(peaks.size(), 0);
    for (double v : heights)
        ++out.histogram.counts[static_cast<std::size_t>(out.thresholds.assign(v))];

    double mean_fwhm = 0.0;
    for (const auto& p : peaks) mean_fwhm += p.sigma * kFwhm;
    mean_fwhm /= static_cast<double>(peaks.size());
    out.resolution_ev = mean_fwhm * photon_energy_ev / spacing;
    return out;
}

}  // namespace sqz
