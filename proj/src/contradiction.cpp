#include "ghz3/contradiction.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "ghz3/elements.hpp"
#include "ghz3/errors.hpp"

namespace ghz3 {

namespace {

cplx omega_c(int k) { return std::polar(1.0, 2.0 * std::numbers::pi * k / 3.0); }

Eigen::MatrixXcd kron3(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b, const Eigen::Matrix3cd& c) {
  Eigen::MatrixXcd ab = Eigen::kroneckerProduct(a, b);
  return Eigen::kroneckerProduct(ab, c);
}

}  // namespace

cplx CyclotomicInt::to_complex() const {
  return static_cast<double>(a_) + static_cast<double>(b_) * omega_c(1);
}

std::string CyclotomicInt::to_string() const {
  std::ostringstream os;
  os << a_ << (b_ < 0 ? " - " : " + ") << (b_ < 0 ? -b_ : b_) << "w";
  return os.str();
}

char to_char(Setting s) {
  switch (s) {
    case Setting::kX: return 'X';
    case Setting::kY: return 'Y';
    case Setting::kW: return 'W';
  }
  return '?';
}

const Eigen::Matrix3cd& QutritOperators::get(Setting s) const {
  switch (s) {
    case Setting::kX: return x;
    case Setting::kY: return y;
    case Setting::kW: return w;
  }
  return x;
}

Eigen::Matrix3cd shift_operator() {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  for (int l = 0; l < 3; ++l) m((l + 1) % 3, l) = 1.0;
  return m;
}

Eigen::Matrix3cd clock_operator() {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  for (int l = 0; l < 3; ++l) m(l, l) = omega_c(l);
  return m;
}

Eigen::Matrix3cd clock_third_root(int branch) {
  if (branch < 0 || branch > 2) throw std::out_of_range("clock_third_root: branch must be 0, 1 or 2");
  const cplx theta = std::polar(1.0, 2.0 * std::numbers::pi / 9.0);
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = theta * omega_c(branch);
  m(2, 2) = theta * theta * omega_c(2 * branch);
  return m;
}

QutritOperators operators_for_branch(int branch) {
  QutritOperators ops;
  ops.branch = branch;
  ops.x = shift_operator();
  ops.z = clock_operator();
  const Eigen::Matrix3cd r = clock_third_root(branch);
  const Eigen::Matrix3cd r2 = r * r;
  ops.y = r * ops.x * r.adjoint();
  ops.w = r2 * ops.x * r2.adjoint();
  return ops;
}

QutritOperators build_operators(int preferred) {
  const StateVector ghz = ideal_ghz();
  for (int i = 0; i < 3; ++i) {
    const int branch = (preferred + i) % 3;
    QutritOperators ops = operators_for_branch(branch);
    try {
      concurrent_set_check(ops, ghz);
      return ops;
    } catch (const NotEigenstate&) {
    }
  }
  throw NoValidBranch("build_operators: no branch of Z^(1/3) yields the concurrent set");
}

std::vector<ConcurrentEntry> concurrent_set() {
  using S = Setting;
  std::vector<ConcurrentEntry> out{{{S::kX, S::kX, S::kX}, 0, {}},
                                   {{S::kY, S::kY, S::kY}, 1, {}},
                                   {{S::kW, S::kW, S::kW}, 2, {}}};
  std::array<S, 3> perm{S::kX, S::kY, S::kW};
  do {
    out.push_back({perm, 1, {}});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Eigen::MatrixXcd three_body(const QutritOperators& ops, const std::array<Setting, 3>& s) {
  return kron3(ops.get(s[0]), ops.get(s[1]), ops.get(s[2]));
}

std::vector<ConcurrentEntry> concurrent_set_check(const QutritOperators& ops, const StateVector& ghz) {
  auto entries = concurrent_set();
  for (auto& e : entries) {
    const StateVector image = three_body(ops, e.settings) * ghz;
    e.eigenvalue = ghz.dot(image) / ghz.squaredNorm();
    const bool eigen = (image - e.eigenvalue * ghz).norm() < 1e-10;
    if (!eigen || std::abs(e.eigenvalue - omega_c(e.omega_exponent)) > 1e-10) {
      std::string name{to_char(e.settings[0]), to_char(e.settings[1]), to_char(e.settings[2])};
      throw NotEigenstate("concurrent_set_check: " + name + " fails on the GHZ state");
    }
  }
  return entries;
}

Eigen::MatrixXcd mermin_operator(const QutritOperators& ops) {
  Eigen::MatrixXcd o = Eigen::MatrixXcd::Zero(kDim, kDim);
  for (const auto& e : concurrent_set()) o += omega_c(-e.omega_exponent) * three_body(ops, e.settings);
  return o;
}

// --- local-realistic enumeration ---------------------------------------------------

int Assignment::value(int party, Setting s) const {
  switch (s) {
    case Setting::kX: return x.at(static_cast<std::size_t>(party));
    case Setting::kY: return y.at(static_cast<std::size_t>(party));
    case Setting::kW: return w.at(static_cast<std::size_t>(party));
  }
  return 0;
}

Assignment Assignment::from_index(int index) {
  if (index < 0 || index >= 19683) throw std::out_of_range("Assignment::from_index");
  Assignment a;
  for (auto* row : {&a.x, &a.y, &a.w}) {
    for (auto& t : *row) {
      t = index % 3;
      index /= 3;
    }
  }
  return a;
}

CyclotomicInt lr_value(const Assignment& a) {
  CyclotomicInt s;
  for (const auto& e : concurrent_set()) {
    int exponent = -e.omega_exponent;
    for (int k = 0; k < 3; ++k) exponent += a.value(k, e.settings[static_cast<std::size_t>(k)]);
    s += CyclotomicInt::omega_power(exponent);
  }
  return s;
}

LrEnumeration lr_enumerate() {
  constexpr int kTotal = 19683;
  constexpr int kParts = 3;
  auto run = [](int begin, int end) {
    LrEnumeration r;
    r.max_twice_real = std::numeric_limits<std::int64_t>::min();
    for (int i = begin; i < end; ++i) {
      const Assignment a = Assignment::from_index(i);
      const CyclotomicInt s = lr_value(a);
      ++r.count;
      r.distinct_values.insert(s);
      r.max_twice_real = std::max(r.max_twice_real, s.twice_real());
      if (s.norm() > r.max_modulus_sq) {
        r.max_modulus_sq = s.norm();
        r.argmax.clear();
      }
      if (s.norm() == r.max_modulus_sq) r.argmax.push_back(a);
    }
    return r;
  };
  std::vector<std::future<LrEnumeration>> parts;
  for (int p = 0; p < kParts; ++p) {
    parts.push_back(std::async(std::launch::async, run, p * kTotal / kParts, (p + 1) * kTotal / kParts));
  }
  LrEnumeration out;
  out.max_twice_real = std::numeric_limits<std::int64_t>::min();
  for (auto& f : parts) {
    LrEnumeration r = f.get();
    out.count += r.count;
    out.distinct_values.insert(r.distinct_values.begin(), r.distinct_values.end());
    out.max_twice_real = std::max(out.max_twice_real, r.max_twice_real);
    if (r.max_modulus_sq > out.max_modulus_sq) {
      out.max_modulus_sq = r.max_modulus_sq;
      out.argmax.clear();
    }
    if (r.max_modulus_sq == out.max_modulus_sq) out.argmax.insert(out.argmax.end(), r.argmax.begin(), r.argmax.end());
  }
  return out;
}

// --- expectations ------------------------------------------------------------------

cplx quantum_expectation(const Eigen::MatrixXcd& op, const DensityMatrix& rho) {
  if (op.rows() != kDim || op.cols() != kDim) throw std::invalid_argument("quantum_expectation: operator must be 27x27");
  return (rho.matrix() * op).trace();
}

double noise_expectation(const NoiseParams& params) {
  params.validate();
  const double a = params.alpha, b = params.beta, g = params.gamma;
  return 9.0 * params.c * params.p * (a * b + g * a + b * g) / (a * a + b * b + g * g);
}

Eigen::Matrix3cd eigenbasis(const QutritOperators& ops, Setting s) {
  Eigen::Matrix3cd v;
  for (int m = 0; m < 3; ++m) {
    for (int l = 0; l < 3; ++l) v(l, m) = omega_c(-m * l) / std::sqrt(3.0);
  }
  const Eigen::Matrix3cd r = clock_third_root(ops.branch);
  switch (s) {
    case Setting::kX: return v;
    case Setting::kY: return r * v;
    case Setting::kW: return r * r * v;
  }
  return v;
}

std::array<double, 27> measurement_protocol(const QutritOperators& ops, const std::array<Setting, 3>& settings,
                                            const DensityMatrix& rho) {
  std::array<Eigen::Matrix3cd, 3> rot;
  for (int k = 0; k < 3; ++k) {
    rot[k] = eigenbasis(ops, settings[k]).adjoint();
    check_unitary(rot[k]);
  }
  const Eigen::MatrixXcd u = kron3(rot[0], rot[1], rot[2]);
  const Eigen::MatrixXcd rotated = u * rho.matrix() * u.adjoint();
  std::array<double, 27> p{};
  for (int i = 0; i < kDim; ++i) p[static_cast<std::size_t>(i)] = std::max(0.0, rotated(i, i).real());
  return p;
}

cplx expected_product(const std::array<double, 27>& table) {
  cplx e = 0.0;
  for (int i = 0; i < kDim; ++i) {
    const auto d = basis_digits(i);
    e += table[static_cast<std::size_t>(i)] * omega_c(d[0] + d[1] + d[2]);
  }
  return e;
}

}  // namespace ghz3
