#include "sqz/jsa_spectrum.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstddef>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kTwoPi = 6.283185307179586476925286766559;

double omega_from_lambda_nm(double lambda_nm) {
    return kTwoPi * kSpeedOfLight / (lambda_nm * 1e-9);
}

double lambda_nm_from_omega(double omega) {
    return kTwoPi * kSpeedOfLight / omega * 1e9;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

}  // namespace

FrequencyGrid FrequencyGrid::from_wavelengths(double lambda_lo_nm, double lambda_hi_nm,
                                              int n) {
    if (!(lambda_lo_nm > 0.0) || !(lambda_hi_nm > lambda_lo_nm))
        throw domain_error("FrequencyGrid: need 0 < lambda_lo < lambda_hi");
    if (n < 2) throw domain_error("FrequencyGrid: need at least two points");
    FrequencyGrid g;
    g.omega_min = omega_from_lambda_nm(lambda_hi_nm);
    g.omega_max = omega_from_lambda_nm(lambda_lo_nm);
    g.n = n;
    return g;
}

std::vector<double> FrequencyGrid::points() const {
    std::vector<double> w(static_cast<std::size_t>(n));
    const double h = step();
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = omega_min + h * i;
    return w;
}

double refractive_index(const SellmeierCoefficients& coeffs, double lambda_nm) {
    if (coeffs.lambda_max_nm > 0.0 &&
        (lambda_nm < coeffs.lambda_min_nm || lambda_nm > coeffs.lambda_max_nm))
        throw domain_error("refractive_index: wavelength outside coefficient validity window");
    const double l2 = (lambda_nm * 1e-3) * (lambda_nm * 1e-3);  // um^2
    double n2 = coeffs.constant - coeffs.quadratic_um2 * l2;
    for (const auto& t : coeffs.terms) n2 += t.strength * l2 / (l2 - t.resonance_um2);
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw domain_error("refractive_index: coefficients give a nonpositive index");
    return std::sqrt(n2);
}

static double wavenumber(const SellmeierCoefficients& coeffs, double omega) {
    return omega * refractive_index(coeffs, lambda_nm_from_omega(omega)) / kSpeedOfLight;
}

// Constant mismatch left over at the degeneracy point; subtracting it makes
// the poling period exact rather than nominal.
static double pinning_offset(const CrystalSpec& crystal,
                             const SellmeierCoefficients& coeffs) {
    const double w0 = omega_from_lambda_nm(crystal.degeneracy_nm);
    return wavenumber(coeffs, 2.0 * w0) - 2.0 * wavenumber(coeffs, w0)
         - kTwoPi / crystal.poling_period_m;
}

double phase_mismatch(const CrystalSpec& crystal, const SellmeierCoefficients& coeffs,
                      double omega_s, double omega_i) {
    if (!(omega_s > 0.0) || !(omega_i > 0.0))
        throw domain_error("phase_mismatch: frequencies must be positive");
    const double raw = wavenumber(coeffs, omega_s + omega_i) - wavenumber(coeffs, omega_s)
                     - wavenumber(coeffs, omega_i) - kTwoPi / crystal.poling_period_m;
    return raw - pinning_offset(crystal, coeffs);
}

JointSpectralAmplitude build_jsa(const CrystalSpec& crystal,
                                 const SellmeierCoefficients& coeffs,
                                 const PumpSpec& pump, const FrequencyGrid& grid) {
    if (grid.n < 64) throw domain_error("build_jsa: grid too small (need >= 64 points)");
    if (!(crystal.length_m > 0.0) || !(crystal.poling_period_m > 0.0))
        throw domain_error("build_jsa: crystal length and poling period must be positive");
    if (!(pump.sigma_omega > 0.0) || !(pump.center_nm > 0.0))
        throw domain_error("build_jsa: pump width and carrier must be positive");
    const double w0 = omega_from_lambda_nm(crystal.degeneracy_nm);
    const double wp0 = omega_from_lambda_nm(pump.center_nm);
    if (!(w0 > grid.omega_min && w0 < grid.omega_max))
        throw domain_error("build_jsa: degeneracy point lies outside the grid");

    const auto w = grid.points();
    const double h = grid.step();
    const double offset = pinning_offset(crystal, coeffs);
    const double kqpm = kTwoPi / crystal.poling_period_m;

    // Single-photon and pump wavenumbers cached on the grid; omega_i + omega_j
    // only takes 2n - 1 distinct values on a uniform grid.
    std::vector<double> ks(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) ks[i] = wavenumber(coeffs, w[i]);
    std::vector<double> kp(2 * w.size() - 1);
    for (std::size_t s = 0; s < kp.size(); ++s)
        kp[s] = wavenumber(coeffs, 2.0 * w[0] + h * static_cast<double>(s));

    // Reject grids too coarse for the phase-matching sinc: the first zeros of
    // sinc(L dk / 2) must straddle several grid steps.
    {
        const double dkp = std::abs(phase_mismatch(crystal, coeffs, w0 + h, w0) -
                                    phase_mismatch(crystal, coeffs, w0 - h, w0)) / (2.0 * h);
        if (dkp > 0.0) {
            const double lobe_steps = 4.0 * kTwoPi / 2.0 / (crystal.length_m * dkp) / h;
            if (lobe_steps < 4.0)
                throw domain_error("build_jsa: grid too coarse to resolve the phase-matching lobe");
        }
    }

    JointSpectralAmplitude jsa;
    jsa.grid = grid;
    jsa.crystal = crystal;
    jsa.pump = pump;
    jsa.amplitude.resize(grid.n, grid.n);
    const double inv4s2 = 1.0 / (4.0 * pump.sigma_omega * pump.sigma_omega);
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const double dk = kp[static_cast<std::size_t>(i + j)]
                            - ks[static_cast<std::size_t>(i)]
                            - ks[static_cast<std::size_t>(j)] - kqpm - offset;
            const double detune = w[static_cast<std::size_t>(i)]
                                + w[static_cast<std::size_t>(j)] - wp0;
            const double alpha = std::exp(-detune * detune * inv4s2);
            jsa.amplitude(i, j) = alpha * sinc(0.5 * crystal.length_m * dk);
        }
    }
    const double norm = jsa.amplitude.norm();
    if (!(norm > 0.0)) throw domain_error("build_jsa: amplitude vanished on the whole grid");
    jsa.amplitude /= norm;
    return jsa;
}

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa) {
    const int n = jsa.grid.n;
    const double h = jsa.grid.step();
    const auto w = jsa.grid.points();
    std::vector<double> intensity(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        intensity[static_cast<std::size_t>(i)] = jsa.amplitude.row(i).squaredNorm() * h;

    MarginalSpectrum out;
    int ipeak = 0;
    for (int i = 1; i < n; ++i)
        if (intensity[static_cast<std::size_t>(i)] > intensity[static_cast<std::size_t>(ipeak)])
            ipeak = i;
    const double half = 0.5 * intensity[static_cast<std::size_t>(ipeak)];

    // Half-maximum crossings by linear interpolation, walking outward.
    double wl = w[0], wr = w[static_cast<std::size_t>(n - 1)];
    bool left = false, right = false;
    for (int i = ipeak; i > 0; --i) {
        const double a = intensity[static_cast<std::size_t>(i - 1)];
        const double b = intensity[static_cast<std::size_t>(i)];
        if (a < half && b >= half) {
            wl = w[static_cast<std::size_t>(i - 1)] + h * (half - a) / (b - a);
            left = true;
            break;
        }
    }
    for (int i = ipeak; i + 1 < n; ++i) {
        const double a = intensity[static_cast<std::size_t>(i)];
        const double b = intensity[static_cast<std::size_t>(i + 1)];
        if (a >= half && b < half) {
            wr = w[static_cast<std::size_t>(i)] + h * (a - half) / (a - b);
            right = true;
            break;
        }
    }
    out.fwhm_defined = left && right;
    if (out.fwhm_defined) {
        out.fwhm_nm = lambda_nm_from_omega(wl) - lambda_nm_from_omega(wr);
        out.omega_center = 0.5 * (wl + wr);
    }

    // Emit ascending in wavelength (descending in omega).
    out.wavelength_nm.resize(static_cast<std::size_t>(n));
    out.intensity.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.wavelength_nm[static_cast<std::size_t>(i)] =
            lambda_nm_from_omega(w[static_cast<std::size_t>(n - 1 - i)]);
        out.intensity[static_cast<std::size_t>(i)] =
            intensity[static_cast<std::size_t>(n - 1 - i)];
    }
    return out;
}

SchmidtModes schmidt_decompose(const JointSpectralAmplitude& jsa, int K_keep) {
    if (K_keep < 1) throw domain_error("schmidt_decompose: K_keep must be positive");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(jsa.amplitude,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw domain_error("schmidt_decompose: SVD failed to converge");
    const int keep = std::min(K_keep, jsa.grid.n);
    const double scale = 1.0 / std::sqrt(jsa.grid.step());
    SchmidtModes m;
    const auto& sv = svd.singularValues();
    m.lambdas.assign(sv.data(), sv.data() + sv.size());
    m.signal_modes = svd.matrixU().leftCols(keep) * scale;
    m.idler_modes = svd.matrixV().leftCols(keep) * scale;
    return m;
}

double effective_mode_number(const std::vector<double>& lambdas) {
    double s2 = 0.0, s4 = 0.0;
    for (double l : lambdas) {
        s2 += l * l;
        s4 += l * l * l * l;
    }
    if (!(s4 > 0.0)) throw domain_error("effective_mode_number: empty Schmidt spectrum");
    return s2 * s2 / s4;  // scale-invariant; equals 1/sum lambda^4 when normalized
}

ThermalLadderFit fit_thermal_mu(const std::vector<double>& lambdas) {
    std::vector<double> lam;
    for (double l : lambdas) {
        if (l > 0.0) lam.push_back(l);
        else break;  // singular values are sorted; stop at the first zero
    }
    if (lam.size() < 3)
        throw domain_error("fit_thermal_mu: need at least three nonzero Schmidt coefficients");

    // Use every mode within a decade of the leading one, but never fewer than
    // three so the fit has a slope.
    std::size_t m = 0;
    while (m < lam.size() && lam[m] >= 0.1 * lam[0]) ++m;
    m = std::min(lam.size(), std::max<std::size_t>(m, 3));

    // log lambda_k = a + k log mu by least squares over k = 0..m-1.
    double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double y = std::log(lam[k]);
        sk += static_cast<double>(k);
        sy += y;
        skk += static_cast<double>(k) * k;
        sky += static_cast<double>(k) * y;
    }
    const double nd = static_cast<double>(m);
    const double slope = (nd * sky - sk * sy) / (nd * skk - sk * sk);
    const double icpt = (sy - slope * sk) / nd;
    if (!(slope < 0.0))
        throw domain_error("fit_thermal_mu: Schmidt spectrum does not decay");

    ThermalLadderFit fit;
    fit.mu = std::exp(slope);
    double rss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = std::log(lam[k]) - (icpt + slope * static_cast<double>(k));
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / nd);
    return fit;
}

}  // namespace sqz
