#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ghz3/contradiction.hpp"
#include "ghz3/errors.hpp"

using namespace ghz3;

namespace {

const cplx kOmega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

// Floating-point reference for the local-realistic values: each setting
// combination contributes omega^(-k) * omega^(v1 + v2 + v3).
struct FloatScan {
  double max_modulus = 0.0;
  double max_real = -1e9;
  std::vector<cplx> distinct;
};

FloatScan float_scan() {
  struct Term {
    std::array<int, 3> setting;  // 0 = X, 1 = Y, 2 = W
    int k;
  };
  std::vector<Term> terms{{{0, 0, 0}, 0}, {{1, 1, 1}, 1}, {{2, 2, 2}, 2}, {{0, 1, 2}, 1}, {{0, 2, 1}, 1},
                          {{1, 0, 2}, 1}, {{1, 2, 0}, 1}, {{2, 0, 1}, 1}, {{2, 1, 0}, 1}};
  FloatScan out;
  for (int idx = 0; idx < 19683; ++idx) {
    int v[3][3];  // v[setting][party]
    int rest = idx;
    for (auto& row : v) {
      for (int& t : row) {
        t = rest % 3;
        rest /= 3;
      }
    }
    cplx s = 0.0;
    for (const auto& t : terms) {
      const int e = v[t.setting[0]][0] + v[t.setting[1]][1] + v[t.setting[2]][2] - t.k;
      s += std::pow(kOmega, ((e % 3) + 3) % 3);
    }
    out.max_modulus = std::max(out.max_modulus, std::abs(s));
    out.max_real = std::max(out.max_real, s.real());
    bool seen = false;
    for (const auto& d : out.distinct) seen = seen || std::abs(d - s) < 1e-9;
    if (!seen) out.distinct.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("cyclotomic arithmetic") {
  const CyclotomicInt w = CyclotomicInt::omega_power(1);
  CHECK(w * w == CyclotomicInt::omega_power(2));
  CHECK(w * w * w == CyclotomicInt(1));
  CHECK(CyclotomicInt::omega_power(-1) == CyclotomicInt::omega_power(2));
  CHECK(CyclotomicInt(1) + w + w * w == CyclotomicInt(0));
  const CyclotomicInt z(-6, -6);
  CHECK(z.norm() == 36);
  CHECK(std::abs(z.to_complex()) == doctest::Approx(6.0));
  CHECK(z.twice_real() == -6);
  CHECK(z.to_string() == "-6 - 6w");
  CHECK(CyclotomicInt(3, 2).to_string() == "3 + 2w");
}

TEST_CASE("cyclic operators") {
  const Eigen::Matrix3cd x = shift_operator();
  Eigen::Vector3cd two = Eigen::Vector3cd::Zero();
  two(2) = 1.0;
  CHECK(std::abs((x * two)(0) - 1.0) < 1e-15);
  const Eigen::Matrix3cd z = clock_operator();
  CHECK(std::abs(z(1, 1) - kOmega) < 1e-15);
  CHECK(std::abs(z(2, 2) - kOmega * kOmega) < 1e-15);

  for (int b = 0; b < 3; ++b) {
    const QutritOperators ops = operators_for_branch(b);
    const Eigen::Matrix3cd r = clock_third_root(b);
    CHECK((r * r * r - z).norm() < 1e-12);
    CHECK((ops.y * ops.y * ops.y - Eigen::Matrix3cd::Identity()).norm() < 1e-12);
    CHECK((ops.w * ops.w * ops.w - Eigen::Matrix3cd::Identity()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(clock_third_root(3), std::out_of_range);
}

TEST_CASE("concurrent set eigenvalues") {
  const QutritOperators ops = build_operators();
  CHECK(ops.branch == 0);
  const auto entries = concurrent_set_check(ops, ideal_ghz());
  REQUIRE(entries.size() == 9);
  CHECK(std::abs(entries[0].eigenvalue - 1.0) < 1e-10);
  CHECK(std::abs(entries[1].eigenvalue - kOmega) < 1e-10);
  CHECK(std::abs(entries[2].eigenvalue - kOmega * kOmega) < 1e-10);
  for (std::size_t i = 3; i < 9; ++i) CHECK(std::abs(entries[i].eigenvalue - kOmega) < 1e-10);

  StateVector product = StateVector::Zero(kDim);
  product(0) = 1.0;
  CHECK_THROWS_AS(concurrent_set_check(ops, product), NotEigenstate);
}

TEST_CASE("quantum value of the Mermin operator") {
  const QutritOperators ops = build_operators();
  const Eigen::MatrixXcd o = mermin_operator(ops);
  const cplx q = quantum_expectation(o, DensityMatrix::pure(ideal_ghz()));
  CHECK(std::abs(q - 9.0) < 1e-10);
  CHECK(std::abs(quantum_expectation(o, DensityMatrix::maximally_mixed())) < 1e-10);
}

TEST_CASE("exact local-realistic enumeration against a floating-point scan") {
  const LrEnumeration lr = lr_enumerate();
  const FloatScan ref = float_scan();
  CHECK(lr.count == 19683);
  CHECK(lr.max_modulus_sq == 36);
  CHECK(std::sqrt(static_cast<double>(lr.max_modulus_sq)) == doctest::Approx(ref.max_modulus).epsilon(1e-12));
  CHECK(lr.distinct_values.size() == 16);
  CHECK(ref.distinct.size() == 16);
  CHECK(static_cast<double>(lr.max_twice_real) / 2.0 == doctest::Approx(ref.max_real).epsilon(1e-12));
  for (const auto& v : lr.distinct_values) {
    CHECK(v.norm() <= 36);
    bool found = false;
    for (const auto& d : ref.distinct) found = found || std::abs(d - v.to_complex()) < 1e-9;
    CHECK(found);
  }
  for (const auto& a : lr.argmax) CHECK(lr_value(a).norm() == 36);
}

TEST_CASE("an explicit maximizer") {
  Assignment ones;
  ones.x = ones.y = ones.w = {0, 0, 0};
  CHECK(lr_value(ones) == CyclotomicInt(-6, -6));
  CHECK(lr_value(Assignment::from_index(0)) == CyclotomicInt(-6, -6));
  CHECK_THROWS_AS(Assignment::from_index(19683), std::out_of_range);
}

TEST_CASE("enumeration is deterministic") {
  const LrEnumeration a = lr_enumerate();
  const LrEnumeration b = lr_enumerate();
  CHECK(a.distinct_values == b.distinct_values);
  REQUIRE(a.argmax.size() == b.argmax.size());
  for (std::size_t i = 0; i < a.argmax.size(); ++i) {
    CHECK(a.argmax[i].x == b.argmax[i].x);
    CHECK(a.argmax[i].y == b.argmax[i].y);
    CHECK(a.argmax[i].w == b.argmax[i].w);
  }
}

TEST_CASE("noise expectation") {
  const NoiseParams table{};
  CHECK(noise_expectation(NoiseParams{1.0, 1.0, 1.0, 1.0, 1.0}) == doctest::Approx(9.0).epsilon(1e-15));
  const Eigen::MatrixXcd o = mermin_operator(build_operators());
  CHECK(std::abs(quantum_expectation(o, noise_model(table)) - noise_expectation(table)) < 1e-10);
  CHECK(noise_expectation(NoiseParams{0.0, 1.0, 1.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("measurement protocol") {
  const QutritOperators ops = build_operators();
  const DensityMatrix ghz = DensityMatrix::pure(ideal_ghz());
  for (const auto& e : concurrent_set()) {
    const auto table = measurement_protocol(ops, e.settings, ghz);
    CHECK(std::abs(expected_product(table) - std::pow(kOmega, e.omega_exponent)) < 1e-10);
  }
  const auto xyw = measurement_protocol(ops, {Setting::kX, Setting::kY, Setting::kW}, ghz);
  CHECK(std::abs(expected_product(xyw) - kOmega) < 1e-10);
  double sum = 0.0;
  for (double p : xyw) sum += p;
  CHECK(sum == doctest::Approx(1.0));
}
