#pragma once

// Qutrit cyclic operators, the concurrent set of the three-qutrit GHZ state,
// the generalized Mermin operator and the exact local-realistic enumeration.

#include <Eigen/Dense>
#include <array>
#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ghz3/photonic.hpp"
#include "ghz3/tomography.hpp"

namespace ghz3 {

// a + b*omega with omega = exp(2 pi i / 3); exact integer arithmetic.
class CyclotomicInt {
 public:
  constexpr CyclotomicInt() = default;
  constexpr CyclotomicInt(std::int64_t a, std::int64_t b = 0) : a_(a), b_(b) {}

  // omega^k for any integer k.
  static constexpr CyclotomicInt omega_power(int k) {
    const int r = ((k % 3) + 3) % 3;
    if (r == 0) return {1, 0};
    if (r == 1) return {0, 1};
    return {-1, -1};  // omega^2 = -1 - omega
  }

  constexpr std::int64_t a() const { return a_; }
  constexpr std::int64_t b() const { return b_; }

  // |z|^2 = a^2 - ab + b^2.
  constexpr std::int64_t norm() const { return a_ * a_ - a_ * b_ + b_ * b_; }
  // 2 Re z = 2a - b.
  constexpr std::int64_t twice_real() const { return 2 * a_ - b_; }

  cplx to_complex() const;
  std::string to_string() const;

  friend constexpr CyclotomicInt operator+(CyclotomicInt x, CyclotomicInt y) { return {x.a_ + y.a_, x.b_ + y.b_}; }
  friend constexpr CyclotomicInt operator-(CyclotomicInt x, CyclotomicInt y) { return {x.a_ - y.a_, x.b_ - y.b_}; }
  friend constexpr CyclotomicInt operator*(CyclotomicInt x, CyclotomicInt y) {
    return {x.a_ * y.a_ - x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_ - x.b_ * y.b_};
  }
  constexpr CyclotomicInt& operator+=(CyclotomicInt y) { return *this = *this + y; }

  // Lexicographic in (a, b); used for ordered sets only.
  friend constexpr auto operator<=>(const CyclotomicInt&, const CyclotomicInt&) = default;

 private:
  std::int64_t a_ = 0;
  std::int64_t b_ = 0;
};

enum class Setting { kX, kY, kW };

char to_char(Setting s);

struct QutritOperators {
  Eigen::Matrix3cd x;
  Eigen::Matrix3cd y;
  Eigen::Matrix3cd w;
  Eigen::Matrix3cd z;
  int branch = 0;  // fractional-power branch used for Y and W

  const Eigen::Matrix3cd& get(Setting s) const;
};

// Shift X|l> = |l+1 mod 3>.
Eigen::Matrix3cd shift_operator();
// Clock Z|l> = omega^l |l>.
Eigen::Matrix3cd clock_operator();
// diag(1, theta omega^k, theta^2 omega^2k), theta = exp(2 pi i / 9).
Eigen::Matrix3cd clock_third_root(int branch);

// Operators for one fixed branch, without the concurrent-set check.
QutritOperators operators_for_branch(int branch);

// Tries branches starting at `preferred` and keeps the first one that passes
// concurrent_set_check; throws NoValidBranch if none does.
QutritOperators build_operators(int preferred = 0);

struct ConcurrentEntry {
  std::array<Setting, 3> settings;
  int omega_exponent = 0;  // expected eigenvalue omega^k
  cplx eigenvalue;         // measured on the state
};

// The nine listed products: XXX (1), YYY (omega), WWW (omega^2) and the six
// orderings of X, Y, W (omega).
std::vector<ConcurrentEntry> concurrent_set();

Eigen::MatrixXcd three_body(const QutritOperators& ops, const std::array<Setting, 3>& s);

// Verifies each product has `ghz` as an eigenvector (1e-10) with the listed
// eigenvalue; throws NotEigenstate otherwise.
std::vector<ConcurrentEntry> concurrent_set_check(const QutritOperators& ops, const StateVector& ghz);

// XXX + w^-1 YYY + w^-2 WWW + w^-1 (sum of the six orderings of X, Y, W).
Eigen::MatrixXcd mermin_operator(const QutritOperators& ops);

// Definite values v(X_k), v(Y_k), v(W_k) as exponents of omega.
struct Assignment {
  std::array<int, 3> x{};
  std::array<int, 3> y{};
  std::array<int, 3> w{};

  int value(int party, Setting s) const;
  static Assignment from_index(int index);  // base-3 digits, 0 <= index < 3^9
};

// Mermin value of an assignment, exact.
CyclotomicInt lr_value(const Assignment& a);

struct LrEnumeration {
  std::int64_t count = 0;
  std::int64_t max_modulus_sq = 0;
  std::int64_t max_twice_real = 0;  // 2 * max Re S
  std::set<CyclotomicInt> distinct_values;
  std::vector<Assignment> argmax;  // all assignments reaching max |S|^2
};

LrEnumeration lr_enumerate();

// Tr(rho O).
cplx quantum_expectation(const Eigen::MatrixXcd& op, const DensityMatrix& rho);

// 9 c p (ab + ga + bg) / (a^2 + b^2 + g^2) for real weights.
double noise_expectation(const NoiseParams& params);

// Eigenbasis of a setting: column m has eigenvalue omega^m.
Eigen::Matrix3cd eigenbasis(const QutritOperators& ops, Setting s);

// Outcome probabilities P(m_B, m_C, m_D), index 9 m_B + 3 m_C + m_D, after
// rotating each party into its setting's eigenbasis.
std::array<double, 27> measurement_protocol(const QutritOperators& ops, const std::array<Setting, 3>& settings,
                                            const DensityMatrix& rho);

// Sum over outcomes of P * omega^(m_B + m_C + m_D).
cplx expected_product(const std::array<double, 27>& table);

}  // namespace ghz3
