#pragma once

// Gaussian joint-spectral model of the four-photon interference and the
// Gaussian dip used to fit delay scans.
//
// Widths are 1/e half-widths in ordinary frequency (Hz): a width s enters as
// exp(-(nu/s)^2).

#include <utility>
#include <vector>

namespace ghz3 {

inline constexpr double kSpeedOfLight = 299792458.0;

// 2 / (sqrt5 * L * delta_inv_gv); L in m, delta_inv_gv in s/m, result in Hz.
double sigma_gvm(double length, double delta_inv_gv);

// lambda_c^2 * dnu / c.
double bandwidth_to_wavelength(double dnu, double lambda_c);

// FWHM <-> 1/e half-width of exp(-(x/s)^2).
double fwhm_from_width(double width);
double width_from_fwhm(double fwhm);

// Closed-form dip visibility for filter width sigma_f and phase-matching
// width sigma_gvm.
double visibility(double sigma_f, double sigma_gvm);

struct SpectralModel {
  double sigma_f = 5.59e11;      // Hz
  double sigma_p = 3.67e12;      // Hz, about 2 nm at 404 nm
  double length = 1e-3;          // m
  double delta_inv_gv = 1.6e-9;  // s/m
  double lambda_c = 808e-9;      // m
  // Multiplies the pair amplitude by exp(-((nu1+nu2)/sigma_p)^2). Off by
  // default; the closed form ignores the pump envelope.
  bool include_pump = false;

  // Throws std::invalid_argument unless every field is positive and finite.
  void validate() const;
  double gvm_width() const { return sigma_gvm(length, delta_inv_gv); }
  // Width of the (nu1+nu2) Gaussian seen by the quadrature.
  double sum_width() const;
};

inline constexpr int kDefaultQuadratureOrder = 24;

// Four-photon detection probability (unnormalized) at delay delta_t seconds.
// delta_t = +-infinity gives the exact limit without the interference term.
// Throws QuadratureNotConverged when doubling the order changes the value by
// more than 1e-6 relative.
double p4_numeric(const SpectralModel& model, double delta_t, int order = kDefaultQuadratureOrder);

// (P4(inf) - P4(0)) / P4(inf).
double p4_visibility(const SpectralModel& model, int order = kDefaultQuadratureOrder);

// Nodes and weights of the n-point Gauss-Hermite rule (weight exp(-x^2)).
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);

struct DipModel {
  double baseline = 1.0;    // counts/s
  double visibility = 0.0;  // in [0,1]
  double width = 1e-3;      // m, 1/e half-width
  double center = 0.0;      // m

  void validate() const;
  double rate(double x) const;
};

struct DipSample {
  double x = 0.0;
  double rate = 0.0;
};

std::vector<DipSample> dip_curve(const DipModel& dip, const std::vector<double>& positions);

// Least-squares fit of all four parameters. Needs at least 5 samples
// (std::invalid_argument); throws FitDiverged when the solver fails.
DipModel fit_dip(const std::vector<DipSample>& samples);

}  // namespace ghz3
