#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace sqz {

// Sellmeier dispersion n^2(lambda) = A + sum_i B_i lambda^2/(lambda^2 - C_i) - D lambda^2
// with lambda in micrometres and a declared wavelength validity window.
struct SellmeierCoefficients {
    struct Term {
        double strength = 0.0;       // B_i
        double resonance_um2 = 0.0;  // C_i
    };
    double constant = 1.0;  // A
    std::vector<Term> terms;
    double quadratic_um2 = 0.0;  // D
    double lambda_min_nm = 0.0;
    double lambda_max_nm = 0.0;
};

struct CrystalSpec {
    double length_m = 0.010;
    double poling_period_m = 24.2e-6;
    double degeneracy_nm = 1535.0;  // signal/idler degeneracy wavelength
};

struct PumpSpec {
    double center_nm = 767.5;
    double sigma_omega = 4.0e11;  // rms angular-frequency width, rad/s
};

// Uniform angular-frequency grid with n points from omega_min to omega_max.
struct FrequencyGrid {
    double omega_min = 0.0;
    double omega_max = 0.0;
    int n = 0;

    static FrequencyGrid from_wavelengths(double lambda_lo_nm, double lambda_hi_nm, int n);
    double step() const { return (omega_max - omega_min) / (n - 1); }
    std::vector<double> points() const;
};

double refractive_index(const SellmeierCoefficients& coeffs, double lambda_nm);

// Quasi-phase-matching mismatch k(omega_s + omega_i) - k(omega_s) - k(omega_i)
// - 2 pi / poling period, pinned so the mismatch vanishes exactly at the
// degeneracy point (the residual constant offset is subtracted).
double phase_mismatch(const CrystalSpec& crystal, const SellmeierCoefficients& coeffs,
                      double omega_s, double omega_i);

// Joint spectral amplitude f = alpha * phi on the grid, Frobenius-normalized:
// phi = sinc(L dk / 2) from phase matching, alpha a Gaussian pump envelope in
// omega_s + omega_i.
struct JointSpectralAmplitude {
    FrequencyGrid grid;
    Eigen::MatrixXcd amplitude;  // row = signal index, column = idler index
    CrystalSpec crystal;
    PumpSpec pump;
};

JointSpectralAmplitude build_jsa(const CrystalSpec& crystal,
                                 const SellmeierCoefficients& coeffs,
                                 const PumpSpec& pump, const FrequencyGrid& grid);

// Signal marginal sum_i |f(omega_s, omega_i)|^2 domega mapped onto the
// wavelength axis, with the full width at half maximum from linear
// interpolation between samples.  fwhm_defined is false when a half-maximum
// crossing falls outside the grid.
struct MarginalSpectrum {
    std::vector<double> wavelength_nm;  // ascending
    std::vector<double> intensity;
    double fwhm_nm = 0.0;
    bool fwhm_defined = false;
    double omega_center = 0.0;  // midpoint of the half-maximum crossings
};

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa);

// Schmidt decomposition via SVD.  lambdas holds all singular values
// (descending, sum of squares = 1); the mode matrices keep the first K_keep
// columns, scaled by 1/sqrt(domega) so the continuum modes are orthonormal
// under the grid measure.
struct SchmidtModes {
    std::vector<double> lambdas;
    Eigen::MatrixXcd signal_modes;
    Eigen::MatrixXcd idler_modes;
};

SchmidtModes schmidt_decompose(const JointSpectralAmplitude& jsa, int K_keep);

// Effective mode number 1 / sum lambda_k^4 for a normalized Schmidt spectrum.
double effective_mode_number(const std::vector<double>& lambdas);

// Geometric-ratio fit lambda_{k+1}/lambda_k ~ mu over the leading modes
// (those within a decade of lambda_0, at least three), least squares in log
// space.  residual is the rms log deviation.
struct ThermalLadderFit {
    double mu = 0.0;
    double residual = 0.0;
};

ThermalLadderFit fit_thermal_mu(const std::vector<double>& lambdas);

}  // namespace sqz
