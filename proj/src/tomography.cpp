#include "ghz3/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "ghz3/errors.hpp"

namespace ghz3 {

int basis_index(int i, int j, int k) {
  for (int v : {i, j, k}) {
    if (v < 0 || v > 2) throw std::out_of_range("basis_index: level outside 0..2");
  }
  return 9 * i + 3 * j + k;
}

std::array<int, 3> basis_digits(int index) {
  if (index < 0 || index >= kDim) throw std::out_of_range("basis_digits: index outside 0..26");
  return {index / 9, (index / 3) % 3, index % 3};
}

void PartyBasis::validate() const {
  for (const auto& labels : oam) {
    if (labels[0] == labels[1] || labels[0] == labels[2] || labels[1] == labels[2]) {
      throw std::invalid_argument("PartyBasis: labels repeat within a party");
    }
  }
  if (paths[0] == paths[1] || paths[0] == paths[2] || paths[1] == paths[2]) {
    throw std::invalid_argument("PartyBasis: paths must be distinct");
  }
}

StateVector state_vector(const PhotonicState& state, const PartyBasis& basis) {
  basis.validate();
  StateVector v = StateVector::Zero(kDim);
  const PhotonicState fock = state.in_convention(Convention::kNormalizedFock);
  for (const auto& [occ, amp] : fock.terms()) {
    std::array<int, 3> level{-1, -1, -1};
    for (const auto& m : occ) {
      auto p = std::find(basis.paths.begin(), basis.paths.end(), m.path);
      if (p == basis.paths.end()) throw UnsupportedMode("state_vector: photon outside the parties at " + to_string(m));
      const auto party = static_cast<std::size_t>(p - basis.paths.begin());
      const auto& labels = basis.oam[party];
      auto l = std::find(labels.begin(), labels.end(), m.oam);
      if (l == labels.end()) throw UnsupportedMode("state_vector: OAM outside the party basis at " + to_string(m));
      if (level[party] != -1) throw std::invalid_argument("state_vector: two photons on one party");
      level[party] = static_cast<int>(l - labels.begin());
    }
    if (std::find(level.begin(), level.end(), -1) != level.end()) {
      throw std::invalid_argument("state_vector: every party needs one photon");
    }
    v(basis_index(level[0], level[1], level[2])) += amp;
  }
  return v;
}

// --- density matrices --------------------------------------------------------

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != kDim || m_.cols() != kDim) throw std::invalid_argument("DensityMatrix: must be 27x27");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0)) > 1e-10) throw std::invalid_argument("DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  if (psi.size() != kDim) throw std::invalid_argument("DensityMatrix::pure: need a 27-vector");
  const StateVector n = psi.normalized();
  return DensityMatrix(n * n.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Eigen::MatrixXcd::Identity(kDim, kDim) / static_cast<double>(kDim));
}

StateVector ideal_ghz(const std::array<double, 3>& weights) {
  StateVector v = StateVector::Zero(kDim);
  for (int k = 0; k < 3; ++k) v(basis_index(k, k, k)) = weights[k];
  if (v.norm() == 0.0) throw std::invalid_argument("ideal_ghz: all weights zero");
  return v.normalized();
}

double fidelity(const DensityMatrix& rho, const StateVector& psi) {
  const cplx f = psi.dot(rho.matrix() * psi);
  return std::clamp(f.real(), 0.0, 1.0);
}

std::array<double, 3> schmidt_coeffs(const StateVector& psi, int party) {
  if (party < 0 || party > 2) throw std::out_of_range("schmidt_coeffs: party must be 0, 1 or 2");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 9);
  for (int idx = 0; idx < kDim; ++idx) {
    const auto d = basis_digits(idx);
    int col = 0;
    for (int k = 0; k < 3; ++k) {
      if (k != party) col = 3 * col + d[k];
    }
    m(d[party], col) = psi(idx);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  const double norm = s.norm();
  return {s(0) / norm, s(1) / norm, s(2) / norm};
}

std::array<int, 3> srv(const StateVector& psi) {
  std::array<int, 3> out{};
  for (int p = 0; p < 3; ++p) {
    const auto s = schmidt_coeffs(psi, p);
    out[p] = static_cast<int>(std::count_if(s.begin(), s.end(), [](double x) { return x > 1e-7; }));
  }
  return out;
}

double witness_bound(const StateVector& psi) {
  double best = 0.0;
  for (int p = 0; p < 3; ++p) {
    const auto s = schmidt_coeffs(psi, p);
    best = std::max(best, s[0] * s[0] + s[1] * s[1]);
  }
  return best;
}

// --- projectors ----------------------------------------------------------------

Ket1 parse_ket(const std::string& d) {
  auto level = [&](char ch) {
    if (ch < '0' || ch > '2') throw std::invalid_argument("parse_ket: bad level in '" + d + "'");
    return ch - '0';
  };
  Ket1 k;
  k.descriptor = d;
  if (d.size() == 1) {
    k.amplitudes[static_cast<std::size_t>(level(d[0]))] = 1.0;
    return k;
  }
  const bool imag = d.size() == 4 && d[3] == 'i';
  if ((d.size() != 3 && !imag) || (d[1] != '+' && d[1] != '-')) {
    throw std::invalid_argument("parse_ket: malformed descriptor '" + d + "'");
  }
  const int a = level(d[0]), b = level(d[2]);
  if (a == b) throw std::invalid_argument("parse_ket: levels must differ in '" + d + "'");
  const double r = 1.0 / std::sqrt(2.0);
  cplx cb = (d[1] == '+') ? 1.0 : -1.0;
  if (imag) cb *= cplx(0.0, 1.0);
  k.amplitudes[static_cast<std::size_t>(a)] = r;
  k.amplitudes[static_cast<std::size_t>(b)] = cb * r;
  return k;
}

std::string ProjectorTriple::key() const {
  return kets[0].descriptor + "|" + kets[1].descriptor + "|" + kets[2].descriptor;
}

double ProjectorTriple::expectation(const DensityMatrix& rho) const {
  StateVector v(kDim);
  for (int idx = 0; idx < kDim; ++idx) {
    const auto d = basis_digits(idx);
    v(idx) = kets[0].amplitudes[d[0]] * kets[1].amplitudes[d[1]] * kets[2].amplitudes[d[2]];
  }
  return v.dot(rho.matrix() * v).real();
}

namespace {

// Slot outcomes: the two eigenprojectors of sigma_x (+, -) or sigma_y (-i, +i)
// with their sign in the difference.
struct SlotTerm {
  const char* suffix;
  double sign;
};
constexpr std::array<SlotTerm, 2> kX{{{"+", 1.0}, {"-", -1.0}}};
constexpr std::array<SlotTerm, 2> kY{{{"-", 1.0}, {"+", -1.0}}};

}  // namespace

std::vector<SignedProjector> offdiag_projectors(const std::array<int, 3>& row, const std::array<int, 3>& col) {
  for (int k = 0; k < 3; ++k) {
    if (row[k] < 0 || row[k] > 2 || col[k] < 0 || col[k] > 2) throw std::out_of_range("offdiag_projectors: level");
    if (row[k] == col[k]) throw std::invalid_argument("offdiag_projectors: row and column must differ in every party");
  }
  // <row|rho|col> = Tr(rho prod_k |col_k><row_k|), |b><a| = (sx + i sy)/2.
  struct Pattern {
    std::array<bool, 3> is_y;
    double coefficient;
    bool imaginary;
  };
  const std::array<Pattern, 8> patterns{{
      {{false, false, false}, 1.0, false},
      {{true, true, false}, -1.0, false},
      {{true, false, true}, -1.0, false},
      {{false, true, true}, -1.0, false},
      {{true, true, true}, -1.0, true},
      {{false, false, true}, 1.0, true},
      {{false, true, false}, 1.0, true},
      {{true, false, false}, 1.0, true},
  }};
  std::vector<SignedProjector> out;
  out.reserve(64);
  for (const auto& pat : patterns) {
    for (int mask = 0; mask < 8; ++mask) {
      SignedProjector sp;
      sp.weight = pat.coefficient / 8.0;
      sp.imaginary = pat.imaginary;
      for (int k = 0; k < 3; ++k) {
        const auto& slot = (pat.is_y[k] ? kY : kX)[(mask >> (2 - k)) & 1];
        std::string desc = std::to_string(row[k]) + slot.suffix + std::to_string(col[k]);
        if (pat.is_y[k]) desc += "i";
        sp.projector.kets[k] = parse_ket(desc);
        sp.weight *= slot.sign;
      }
      out.push_back(std::move(sp));
    }
  }
  return out;
}

cplx reconstruct_element(const DensityMatrix& rho, const std::array<int, 3>& row, const std::array<int, 3>& col) {
  double re = 0.0, im = 0.0;
  for (const auto& sp : offdiag_projectors(row, col)) {
    (sp.imaginary ? im : re) += sp.weight * sp.projector.expectation(rho);
  }
  return {re, im};
}

MeasurementPlan witness_plan(const std::vector<std::pair<std::array<int, 3>, std::array<int, 3>>>& elements) {
  MeasurementPlan plan;
  plan.elements = elements;
  for (int idx = 0; idx < kDim; ++idx) {
    const auto d = basis_digits(idx);
    ProjectorTriple p;
    for (int k = 0; k < 3; ++k) p.kets[k] = parse_ket(std::to_string(d[k]));
    plan.settings.push_back(std::move(p));
  }
  for (const auto& [row, col] : elements) {
    for (auto& sp : offdiag_projectors(row, col)) plan.settings.push_back(std::move(sp.projector));
  }
  return plan;
}

// --- noise model ---------------------------------------------------------------

void NoiseParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0) || !(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("NoiseParams: p and c must lie in [0,1]");
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) throw std::invalid_argument("NoiseParams: all weights zero");
}

DensityMatrix noise_model(const NoiseParams& params) {
  params.validate();
  const StateVector g = ideal_ghz({params.alpha, params.beta, params.gamma});
  const Eigen::MatrixXcd proj = g * g.adjoint();
  Eigen::MatrixXcd diag = proj.diagonal().asDiagonal();
  Eigen::MatrixXcd off = proj - diag;
  Eigen::MatrixXcd m = params.p * (diag + params.c * off) +
                       (1.0 - params.p) / kDim * Eigen::MatrixXcd::Identity(kDim, kDim);
  return DensityMatrix(std::move(m));
}

// --- counting ------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double poisson_draw(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng));
}

}  // namespace

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, const MeasurementPlan& plan, double total_events,
                                         std::uint64_t seed, bool sample) {
  if (!(total_events > 0.0)) throw std::invalid_argument("simulate_counts: total_events must be positive");
  std::vector<double> expect;
  double sum = 0.0;
  for (const auto& s : plan.settings) {
    expect.push_back(std::max(0.0, s.expectation(rho)));
    sum += expect.back();
  }
  if (!(sum > 0.0)) throw std::invalid_argument("simulate_counts: plan has zero total weight");
  std::mt19937_64 rng(seed);
  std::vector<CountRecord> out;
  out.reserve(plan.settings.size());
  for (std::size_t i = 0; i < plan.settings.size(); ++i) {
    const double mean = total_events * expect[i] / sum;
    out.push_back({plan.settings[i], sample ? poisson_draw(rng, mean) : mean, 1.0, 0.0});
  }
  return out;
}

namespace {

struct Estimator {
  // Indices into the record array.
  std::vector<std::size_t> diagonal;  // 27, basis order
  struct Element {
    int row, col;
    // Eight groups of eight outcomes; each group resolves one product of
    // sigma operators on the 2x2x2 subspace spanned by row and col levels.
    std::vector<std::vector<std::pair<std::size_t, SignedProjector>>> groups;
    std::vector<int> subspace;  // basis indices of that subspace
  };
  std::vector<Element> elements;
  StateVector target;

  struct Reconstruction {
    std::vector<double> populations;
    std::vector<cplx> coherences;  // one per element
  };

  Reconstruction reconstruct(const std::vector<double>& rates) const {
    double norm = 0.0;
    for (auto i : diagonal) norm += rates[i];
    if (!(norm > 0.0)) throw std::invalid_argument("estimate_fidelity: no diagonal counts");
    Reconstruction out;
    for (auto i : diagonal) out.populations.push_back(rates[i] / norm);
    for (const auto& e : elements) {
      double sub = 0.0;
      for (int k : e.subspace) sub += out.populations[static_cast<std::size_t>(k)];
      double re = 0.0, im = 0.0;
      for (const auto& group : e.groups) {
        double total = 0.0;
        for (const auto& [idx, sp] : group) total += rates[idx];
        if (!(total > 0.0)) continue;
        for (const auto& [idx, sp] : group) (sp.imaginary ? im : re) += sp.weight * sub * rates[idx] / total;
      }
      out.coherences.emplace_back(re, im);
    }
    return out;
  }

  double fidelity(const Reconstruction& r) const {
    double f = 0.0;
    for (int k = 0; k < kDim; ++k) f += std::norm(target(k)) * r.populations[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const auto& e = elements[i];
      f += 2.0 * (std::conj(target(e.row)) * r.coherences[i] * target(e.col)).real();
    }
    return f;
  }

  double fidelity(const std::vector<double>& rates) const { return fidelity(reconstruct(rates)); }
};

}  // namespace

FidelityEstimate estimate_fidelity(const std::vector<CountRecord>& records, const StateVector& target, int resamples,
                                   std::uint64_t seed) {
  if (target.size() != kDim) throw std::invalid_argument("estimate_fidelity: target must be a 27-vector");
  std::map<std::string, std::size_t> by_key;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].counts < 0.0 || !(records[i].duration_s > 0.0)) {
      throw std::invalid_argument("estimate_fidelity: negative counts or non-positive duration");
    }
    if (!by_key.emplace(records[i].projector.key(), i).second) {
      throw std::invalid_argument("estimate_fidelity: duplicate setting " + records[i].projector.key());
    }
  }
  auto lookup = [&](const std::string& key) {
    auto it = by_key.find(key);
    if (it == by_key.end()) throw std::invalid_argument("estimate_fidelity: missing setting " + key);
    return it->second;
  };

  Estimator est;
  est.target = target.normalized();
  for (int idx = 0; idx < kDim; ++idx) {
    const auto d = basis_digits(idx);
    est.diagonal.push_back(lookup(std::to_string(d[0]) + "|" + std::to_string(d[1]) + "|" + std::to_string(d[2])));
  }
  std::vector<int> support;
  for (int k = 0; k < kDim; ++k) {
    if (std::abs(est.target(k)) > 1e-14) support.push_back(k);
  }
  for (std::size_t a = 0; a < support.size(); ++a) {
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      Estimator::Element e{support[a], support[b], {}, {}};
      const auto row = basis_digits(e.row), col = basis_digits(e.col);
      auto projectors = offdiag_projectors(row, col);
      for (std::size_t g = 0; g < projectors.size(); g += 8) {
        e.groups.emplace_back();
        for (std::size_t j = g; j < g + 8; ++j) {
          e.groups.back().emplace_back(lookup(projectors[j].projector.key()), std::move(projectors[j]));
        }
      }
      for (int mask = 0; mask < 8; ++mask) {
        std::array<int, 3> d{};
        for (int k = 0; k < 3; ++k) d[k] = ((mask >> k) & 1) ? col[k] : row[k];
        e.subspace.push_back(basis_index(d[0], d[1], d[2]));
      }
      est.elements.push_back(std::move(e));
    }
  }

  auto rates_from = [&](const std::vector<double>& counts) {
    std::vector<double> r(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      r[i] = std::max(counts[i] - records[i].accidentals, 0.0) / records[i].duration_s;
    }
    return r;
  };
  std::vector<double> counts(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) counts[i] = records[i].counts;

  FidelityEstimate out;
  const auto rec = est.reconstruct(rates_from(counts));
  out.fidelity = est.fidelity(rec);
  std::copy(rec.populations.begin(), rec.populations.end(), out.populations.begin());
  for (std::size_t i = 0; i < est.elements.size(); ++i) {
    out.coherences.push_back({basis_digits(est.elements[i].row), basis_digits(est.elements[i].col), rec.coherences[i]});
  }
  if (resamples > 1) {
    double mean = 0.0, m2 = 0.0;
    int n = 0;
    std::vector<double> drawn(records.size());
    for (int r = 0; r < resamples; ++r) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      for (std::size_t i = 0; i < records.size(); ++i) drawn[i] = poisson_draw(rng, records[i].counts);
      double f;
      try {
        f = est.fidelity(rates_from(drawn));
      } catch (const std::invalid_argument&) {
        continue;  // resample without diagonal counts
      }
      ++n;
      const double delta = f - mean;
      mean += delta / n;
      m2 += delta * (f - mean);
    }
    if (n > 1) out.sigma = std::sqrt(m2 / (n - 1));
  }
  return out;
}

}  // namespace ghz3
