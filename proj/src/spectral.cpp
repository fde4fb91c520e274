#include "ghz3/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/NonLinearOptimization>

#include "ghz3/errors.hpp"

namespace ghz3 {

double sigma_gvm(double length, double delta_inv_gv) {
  if (!(length > 0.0) || !(delta_inv_gv > 0.0)) throw std::invalid_argument("sigma_gvm: inputs must be positive");
  return 2.0 / (std::sqrt(5.0) * length * delta_inv_gv);
}

double bandwidth_to_wavelength(double dnu, double lambda_c) {
  if (dnu < 0.0 || !(lambda_c > 0.0)) throw std::invalid_argument("bandwidth_to_wavelength: bad input");
  return lambda_c * lambda_c * dnu / kSpeedOfLight;
}

double fwhm_from_width(double width) { return 2.0 * width * std::sqrt(std::log(2.0)); }
double width_from_fwhm(double fwhm) { return fwhm / (2.0 * std::sqrt(std::log(2.0))); }

double visibility(double sigma_f, double sigma_gvm) {
  if (!(sigma_f > 0.0) || !(sigma_gvm > 0.0)) throw std::invalid_argument("visibility: widths must be positive");
  const double f2 = sigma_f * sigma_f, g2 = sigma_gvm * sigma_gvm;
  return sigma_gvm * std::sqrt(2.0 * f2 + g2) / (f2 + g2);
}

void SpectralModel::validate() const {
  for (double v : {sigma_f, sigma_p, length, delta_inv_gv, lambda_c}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("SpectralModel: fields must be positive");
  }
}

double SpectralModel::sum_width() const {
  const double g = gvm_width();
  if (!include_pump) return g;
  return 1.0 / std::sqrt(1.0 / (g * g) + 1.0 / (sigma_p * sigma_p));
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: order must be positive");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> nodes(n), weights(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    weights[k] = std::sqrt(std::numbers::pi) * v0 * v0;
  }
  return {nodes, weights};
}

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      c_ += (sum_ - t) + v;
    } else {
      c_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

double p4_fixed_order(const SpectralModel& m, double delta_t, int order) {
  const auto [x, w] = gauss_hermite(order);
  const double a = 1.0 / (m.sigma_f * m.sigma_f);
  const double g = m.sum_width();
  const double b = 1.0 / (g * g);
  const double s = 1.0 / std::sqrt(2.0 * a + 2.0 * b);
  // Scaled coordinates nu = s * x.
  const double as = a * s * s, bs = b * s * s;
  const bool interference = std::isfinite(delta_t);
  const std::size_t n = x.size();

  std::vector<double> ew(n), phi(n * n), cosine(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) ew[i] = w[i] * std::exp(x[i] * x[i]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double sum = x[i] + x[k];
      phi[i * n + k] = std::exp(-as * (x[i] * x[i] + x[k] * x[k]) - bs * sum * sum);
      if (interference) cosine[i * n + k] = std::cos(2.0 * std::numbers::pi * s * (x[k] - x[i]) * delta_t);
    }
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double wijk = ew[i] * ew[j] * ew[k];
        for (std::size_t l = 0; l < n; ++l) {
          const double amp1 = phi[i * n + j] * phi[k * n + l];
          const double amp2 = phi[k * n + j] * phi[i * n + l];
          double v = amp1 * amp1 + amp2 * amp2;
          if (interference) v -= 2.0 * amp1 * amp2 * cosine[i * n + k];
          total.add(wijk * ew[l] * v);
        }
      }
    }
  }
  return total.value() * std::pow(s, 4);
}

}  // namespace

double p4_numeric(const SpectralModel& model, double delta_t, int order) {
  model.validate();
  if (std::isnan(delta_t)) throw std::invalid_argument("p4_numeric: delay is NaN");
  if (order < 2) throw std::invalid_argument("p4_numeric: order must be at least 2");
  const double v = p4_fixed_order(model, delta_t, order);
  const double v2 = p4_fixed_order(model, delta_t, 2 * order);
  if (std::abs(v2 - v) > 1e-6 * std::abs(v2)) {
    throw QuadratureNotConverged("p4_numeric: order doubling changed the result beyond 1e-6");
  }
  return v;
}

double p4_visibility(const SpectralModel& model, int order) {
  const double far = p4_numeric(model, std::numeric_limits<double>::infinity(), order);
  const double at_zero = p4_numeric(model, 0.0, order);
  return (far - at_zero) / far;
}

// --- dip model -----------------------------------------------------------------

void DipModel::validate() const {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw std::invalid_argument("DipModel: visibility outside [0,1]");
  if (!(width > 0.0)) throw std::invalid_argument("DipModel: width must be positive");
}

double DipModel::rate(double x) const {
  const double u = (x - center) / width;
  return baseline * (1.0 - visibility * std::exp(-u * u));
}

std::vector<DipSample> dip_curve(const DipModel& dip, const std::vector<double>& positions) {
  dip.validate();
  std::vector<DipSample> out;
  out.reserve(positions.size());
  for (double x : positions) out.push_back({x, dip.rate(x)});
  return out;
}

namespace {

// Residuals in normalized units: x -> (x - shift) / scale, rate -> rate / rmax.
// Parameters: baseline, visibility, width, center.
struct DipResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  Eigen::VectorXd xs, ys;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(xs.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      const double u = (xs(i) - p(3)) / p(2);
      f(i) = p(0) * (1.0 - p(1) * std::exp(-u * u)) - ys(i);
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      const double u = (xs(i) - p(3)) / p(2);
      const double e = std::exp(-u * u);
      jac(i, 0) = 1.0 - p(1) * e;
      jac(i, 1) = -p(0) * e;
      jac(i, 2) = -p(0) * p(1) * e * 2.0 * u * u / p(2);
      jac(i, 3) = -p(0) * p(1) * e * 2.0 * u / p(2);
    }
    return 0;
  }
};

}  // namespace

DipModel fit_dip(const std::vector<DipSample>& samples) {
  if (samples.size() < 5) throw std::invalid_argument("fit_dip: need at least 5 samples");
  auto [lo_x, hi_x] = std::minmax_element(samples.begin(), samples.end(),
                                          [](const auto& a, const auto& b) { return a.x < b.x; });
  auto [lo_r, hi_r] = std::minmax_element(samples.begin(), samples.end(),
                                          [](const auto& a, const auto& b) { return a.rate < b.rate; });
  const double span = hi_x->x - lo_x->x;
  const double shift = 0.5 * (hi_x->x + lo_x->x);
  const double rmax = hi_r->rate;
  if (!(span > 0.0) || !(rmax > 0.0)) throw std::invalid_argument("fit_dip: samples must span a range with positive rates");

  double mean = 0.0;
  for (const auto& s : samples) mean += s.rate;
  mean /= static_cast<double>(samples.size());
  if (rmax - lo_r->rate <= 1e-12 * rmax) return {mean, 0.0, span / 4.0, shift};

  DipResiduals fn;
  fn.xs.resize(static_cast<Eigen::Index>(samples.size()));
  fn.ys.resize(fn.xs.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    fn.xs(static_cast<Eigen::Index>(i)) = (samples[i].x - shift) / span;
    fn.ys(static_cast<Eigen::Index>(i)) = samples[i].rate / rmax;
  }

  // Start: depth from the extremes, width from the half-depth crossing.
  const double floor = lo_r->rate / rmax;
  const double half = 0.5 * (1.0 + floor);
  double below_lo = 1e300, below_hi = -1e300;
  for (Eigen::Index i = 0; i < fn.xs.size(); ++i) {
    if (fn.ys(i) <= half) {
      below_lo = std::min(below_lo, fn.xs(i));
      below_hi = std::max(below_hi, fn.xs(i));
    }
  }
  double w0 = 0.5 * (below_hi - below_lo) / std::sqrt(std::log(2.0));
  if (!(w0 > 0.0)) w0 = 0.05;
  Eigen::VectorXd p(4);
  p << 1.0, 1.0 - floor, w0, (lo_r->x - shift) / span;

  Eigen::LevenbergMarquardt<DipResiduals> lm(fn);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);
  const bool ok = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;
  if (!ok || !p.allFinite() || p(2) == 0.0) throw FitDiverged("fit_dip: least-squares solver did not converge");

  DipModel out;
  out.baseline = p(0) * rmax;
  out.visibility = std::clamp(p(1), 0.0, 1.0);
  out.width = std::abs(p(2)) * span;
  out.center = p(3) * span + shift;
  return out;
}

}  // namespace ghz3
