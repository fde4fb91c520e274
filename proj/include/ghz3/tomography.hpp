#pragma once

// Three-qutrit states on parties B, C, D: fidelities, Schmidt structure, the
// dimensionality witness and its measurement plan, simulated counting.
//
// Logical basis index of |i j k> is 9i + 3j + k (party order B, C, D).

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ghz3/photonic.hpp"

namespace ghz3 {

inline constexpr int kDim = 27;

using StateVector = Eigen::VectorXcd;  // length 27

int basis_index(int i, int j, int k);
std::array<int, 3> basis_digits(int index);

// OAM labels carrying the logical levels 0, 1, 2 of each party.
struct PartyBasis {
  std::array<PathId, 3> paths{PathId("B"), PathId("C"), PathId("D")};
  std::array<std::array<int, 3>, 3> oam{{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}};

  // Throws std::invalid_argument when labels repeat within a party.
  void validate() const;
};

// Three-photon state (one photon per party) as a 27-vector. Photons with a
// label outside the party basis throw UnsupportedMode.
StateVector state_vector(const PhotonicState& state, const PartyBasis& basis = {});

class DensityMatrix {
 public:
  // Throws std::invalid_argument when not Hermitian (1e-10), trace != 1
  // (1e-10) or an eigenvalue below -1e-8.
  explicit DensityMatrix(Eigen::MatrixXcd m);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed();

  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

 private:
  Eigen::MatrixXcd m_;
};

// Normalized (w0|000> + w1|111> + w2|222>). Throws std::invalid_argument if
// all weights vanish.
StateVector ideal_ghz(const std::array<double, 3>& weights = {1.0, 1.0, 1.0});

// <psi|rho|psi>, clamped to [0,1].
double fidelity(const DensityMatrix& rho, const StateVector& psi);

// Schmidt coefficients of `party` (0 = B, 1 = C, 2 = D) against the other two,
// descending.
std::array<double, 3> schmidt_coeffs(const StateVector& psi, int party);

// Number of Schmidt coefficients above 1e-7 for each of the three splits.
std::array<int, 3> srv(const StateVector& psi);

// Largest, over the splits, sum of all but the smallest squared coefficient.
double witness_bound(const StateVector& psi);

// ---- projective measurements ------------------------------------------------

// Single-photon ket on one qutrit with its text descriptor: "a", "a+b",
// "a-b", "a+bi", "a-bi" for levels a, b (superpositions normalized by 1/sqrt2).
struct Ket1 {
  std::string descriptor;
  std::array<cplx, 3> amplitudes{};
};

// Throws std::invalid_argument on malformed descriptors.
Ket1 parse_ket(const std::string& descriptor);

struct ProjectorTriple {
  std::array<Ket1, 3> kets;

  std::string key() const;  // "descB|descC|descD"
  double expectation(const DensityMatrix& rho) const;  // Tr(rho P)
};

struct SignedProjector {
  ProjectorTriple projector;
  double weight = 0.0;     // contribution weight * Tr(rho P)
  bool imaginary = false;  // routes into the imaginary part
};

// The 64 weighted projectors whose signed sum gives <row|rho|col>. The two
// basis labels must differ in every party (std::invalid_argument otherwise).
std::vector<SignedProjector> offdiag_projectors(const std::array<int, 3>& row, const std::array<int, 3>& col);

// Combines the projector expectations; equal to rho(row, col).
cplx reconstruct_element(const DensityMatrix& rho, const std::array<int, 3>& row, const std::array<int, 3>& col);

struct MeasurementPlan {
  std::vector<ProjectorTriple> settings;  // 27 diagonal settings first
  std::vector<std::pair<std::array<int, 3>, std::array<int, 3>>> elements;
};

// 27 diagonal projections plus the 64 projections of each listed element.
MeasurementPlan witness_plan(
    const std::vector<std::pair<std::array<int, 3>, std::array<int, 3>>>& elements = {
        {{0, 0, 0}, {1, 1, 1}}, {{0, 0, 0}, {2, 2, 2}}, {{1, 1, 1}, {2, 2, 2}}});

// ---- noise model ------------------------------------------------------------

struct NoiseParams {
  double p = 0.878;
  double c = 0.817;
  double alpha = 0.685;
  double beta = 0.588;
  double gamma = 0.491;

  void validate() const;
};

// p (D + c Off) + (1 - p) I / 27 with D and Off the diagonal and off-diagonal
// parts of the weighted GHZ projector.
DensityMatrix noise_model(const NoiseParams& params);

// ---- counting ---------------------------------------------------------------

struct CountRecord {
  ProjectorTriple projector;
  double counts = 0.0;        // non-negative; integral when sampled
  double duration_s = 1.0;
  double accidentals = 0.0;   // subtracted (floored at zero) before estimation
};

// Expected counts total_events * Tr(rho P) / sum over the plan, equal
// duration per setting, Poisson-sampled from `seed`. With sample == false the
// expected values are returned unchanged.
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const MeasurementPlan& plan, double total_events,
                                         std::uint64_t seed, bool sample = true);

struct EstimatedElement {
  std::array<int, 3> row{};
  std::array<int, 3> col{};
  cplx value;
};

struct FidelityEstimate {
  double fidelity = 0.0;
  double sigma = 0.0;
  std::array<double, kDim> populations{};   // estimated diagonal
  std::vector<EstimatedElement> coherences;  // <row|rho|col> for row < col in the target support
};

// Fidelity with `target` from the records. Populations are rate / sum of the
// 27 diagonal rates. Each off-diagonal element is built from its eight groups
// of eight outcomes: a group's signed rate fraction times the population of
// the 2x2x2 subspace it resolves. Off-diagonal target elements need their 64
// projections in the records (std::invalid_argument otherwise).
// sigma is the standard deviation over `resamples` Poisson resamplings of the
// counts, seeded per resample from `seed`.
FidelityEstimate estimate_fidelity(const std::vector<CountRecord>& records, const StateVector& target,
                                   int resamples = 1000, std::uint64_t seed = 1);

// Per-resample seed derived from a base seed and a counter (SplitMix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter);

}  // namespace ghz3
