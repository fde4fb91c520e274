#pragma once

// Seeded generators shared by the test binaries.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace testing_support {

using cplx = std::complex<double>;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  cplx complex_normal() { return {normal(), normal()}; }
  bool coin() { return integer(0, 1) == 1; }

  Eigen::MatrixXcd ginibre(int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = complex_normal();
    }
    return m;
  }

  // Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
  Eigen::MatrixXcd unitary(int n) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre(n, n));
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR();
    for (int k = 0; k < n; ++k) {
      const cplx d = r(k, k);
      if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
    }
    return q;
  }

  // Random mixed state of rank `rank`.
  Eigen::MatrixXcd density(int n, int rank) {
    const Eigen::MatrixXcd g = ginibre(n, rank);
    Eigen::MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
