// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero if
// any selected criterion fails.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "ghz3/contradiction.hpp"
#include "ghz3/counts.hpp"
#include "ghz3/experiment.hpp"
#include "ghz3/spectral.hpp"
#include "ghz3/tomography.hpp"

using namespace ghz3;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kGhzFidelityTol = 1e-10;
constexpr double kVisibilityTol = 1e-12;
constexpr double kQuadratureRelTol = 0.01;
constexpr double kFitTol = 1e-6;
constexpr double kWavelengthRelTol = 0.02;
constexpr double kWitnessSlack = 1e-9;
constexpr double kReconstructionTol = 1e-12;
constexpr double kQuantumValueTol = 1e-10;
constexpr double kNoiseTarget = 6.26;
constexpr double kNoiseTol = 0.02;
constexpr double kTraceTol = 1e-10;
constexpr double kMuTarget = 8.4e-4;
constexpr double kMuRelTol = 0.01;
constexpr double kRatioTarget = 4.8e-4;
constexpr double kRatioRelTol = 0.02;
constexpr double kSigmaLow = 0.01;
constexpr double kSigmaHigh = 0.05;

// Runtime limits in seconds.
constexpr double kLimit1 = 1.0, kLimit2 = 1.0, kLimit3 = 10.0, kLimit5 = 60.0, kLimit6 = 5.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome ghz_generation() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineResult res = run_pipeline(PipelineConfig{});
  const std::array<PathId, 3> parties{PathId("B"), PathId("C"), PathId("D")};
  const double f = fidelity_pure(declared_relabeling().apply_to(res.bcd_state), ghz_state(parties));
  PartyBasis basis;
  basis.oam = {{{2, 3, -1}, {0, 1, -1}, {0, 1, -1}}};
  const auto ranks = srv(state_vector(res.bcd_state, basis));
  const double dt = seconds_since(t0);
  o.require(res.bcd_state.size() == 3, "term count " + std::to_string(res.bcd_state.size()));
  o.require(f >= 1.0 - kGhzFidelityTol, "fidelity " + fmt(f));
  o.require(ranks == std::array<int, 3>{3, 3, 3}, "srv");
  o.require(dt < kLimit1, "runtime " + fmt(dt));
  o.note("F=" + fmt(f) + " srv=(" + std::to_string(ranks[0]) + "," + std::to_string(ranks[1]) + "," +
         std::to_string(ranks[2]) + ") t=" + fmt(dt) + "s");
  return o;
}

Outcome term_elimination() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const TermClassification c = classify_terms(PipelineConfig{});
  const double dt = seconds_since(t0);
  const int s = c.count(Verdict::kSurvives), p = c.count(Verdict::kParityBlocked), x = c.count(Verdict::kCrossBlocked);
  o.require(c.combos.size() == 9, "combo count");
  o.require(s == 3 && p == 4 && x == 2, "counts");
  o.require(dt < kLimit2, "runtime " + fmt(dt));
  o.note(std::to_string(s) + "/" + std::to_string(p) + "/" + std::to_string(x) + " t=" + fmt(dt) + "s");
  return o;
}

Outcome hom_model() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SpectralModel m;
  const double g = m.gvm_width();
  const double v = visibility(g, g);
  o.require(std::abs(v - std::sqrt(3.0) / 2.0) <= kVisibilityTol, "closed form " + fmt(v));
  double worst = 0.0;
  for (int i = 0; i <= 6; ++i) {
    m.sigma_f = (0.5 + 1.5 * i / 6.0) * g;
    const double closed = visibility(m.sigma_f, g);
    worst = std::max(worst, std::abs(p4_visibility(m) - closed) / closed);
  }
  o.require(worst <= kQuadratureRelTol, "quadrature deviation " + fmt(worst));
  const DipModel truth{1000.0, 0.834, 800e-6, 0.0};
  std::vector<double> xs;
  for (int i = 0; i <= 120; ++i) xs.push_back(-3e-3 + 6e-3 * i / 120.0);
  const DipModel fit = fit_dip(dip_curve(truth, xs));
  o.require(std::abs(fit.visibility - truth.visibility) <= kFitTol, "fit V " + fmt(fit.visibility));
  o.require(std::abs(fit.width - truth.width) / truth.width <= kFitTol, "fit w " + fmt(fit.width));
  const double dt = seconds_since(t0);
  o.require(dt < kLimit3, "runtime " + fmt(dt));
  o.note("V=" + fmt(v) + " quad_dev=" + fmt(worst) + " fitV=" + fmt(fit.visibility) + " fitw=" + fmt(fit.width) +
         " t=" + fmt(dt) + "s");
  return o;
}

Outcome spectral_numbers() {
  Outcome o;
  const SpectralModel m;
  const double g = m.gvm_width();
  const double dl = bandwidth_to_wavelength(g, m.lambda_c);
  o.require(std::abs(g / 559e9 - 1.0) <= kWavelengthRelTol, "sigma " + fmt(g));
  o.require(std::abs(dl / 1.2e-9 - 1.0) <= kWavelengthRelTol, "width " + fmt(dl));
  o.note("sigma_gvm=" + fmt(g) + "Hz dlambda=" + fmt(dl) + "m");
  return o;
}

Outcome witness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const StateVector ghz = ideal_ghz();
  const double fmax = witness_bound(ghz);
  o.require(std::abs(fmax - 2.0 / 3.0) <= 1e-15, "F_max " + fmt(fmax));

  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> n01;
  auto gaussian = [&](int r, int c) {
    Eigen::MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = cplx(n01(rng), n01(rng));
    }
    return m;
  };
  auto haar = [&] {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian(3, 3));
    Eigen::MatrixXcd q = qr.householderQ();
    for (int k = 0; k < 3; ++k) {
      const cplx d = qr.matrixQR()(k, k);
      q.col(k) *= d / std::abs(d);
    }
    return q;
  };
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    // Schmidt rank two on party `trial % 3`. Odd trials perturb the extremal
    // state (|000> + |111>)/sqrt2, even trials are generic.
    const int party = trial % 3;
    const bool near_extremal = trial % 2 == 1;
    Eigen::MatrixXcd coeff = gaussian(9, 2);
    if (near_extremal) {
      coeff *= 0.02;
      coeff(0, 0) += 1.0;
      coeff(4, 1) += 1.0;
    }
    StateVector v = StateVector::Zero(kDim);
    for (int r = 0; r < 9; ++r) {
      for (int k = 0; k < 2; ++k) {
        std::array<int, 3> d{};
        d[party] = k;
        int slot = 0;
        for (int q = 0; q < 3; ++q) {
          if (q != party) d[q] = slot++ == 0 ? r / 3 : r % 3;
        }
        v(basis_index(d[0], d[1], d[2])) = coeff(r, k);
      }
    }
    v.normalize();
    if (!near_extremal) {
      const Eigen::MatrixXcd ab = Eigen::kroneckerProduct(haar(), haar());
      v = Eigen::MatrixXcd(Eigen::kroneckerProduct(ab, haar())) * v;
    }
    worst = std::max(worst, std::norm(ghz.dot(v)));
  }
  o.require(worst <= 2.0 / 3.0 + kWitnessSlack, "lower-SRV fidelity " + fmt(worst));

  double recon = 0.0;
  std::uniform_int_distribution<int> lvl(0, 2), step(1, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXcd g = gaussian(kDim, 1 + trial % kDim);
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    const DensityMatrix dm(rho);
    std::array<int, 3> row{}, col{};
    for (int q = 0; q < 3; ++q) {
      row[q] = lvl(rng);
      col[q] = (row[q] + step(rng)) % 3;
    }
    const cplx direct = rho(basis_index(row[0], row[1], row[2]), basis_index(col[0], col[1], col[2]));
    recon = std::max(recon, std::abs(reconstruct_element(dm, row, col) - direct));
  }
  o.require(recon <= kReconstructionTol, "reconstruction error " + fmt(recon));

  const std::size_t plan = witness_plan().settings.size();
  o.require(plan == 219, "plan size " + std::to_string(plan));
  const double dt = seconds_since(t0);
  o.require(dt < kLimit5, "runtime " + fmt(dt));
  o.note("F_max=" + fmt(fmax) + " worst_lowSRV=" + fmt(worst) + " recon_err=" + fmt(recon) +
         " plan=" + std::to_string(plan) + " t=" + fmt(dt) + "s");
  return o;
}

Outcome contradiction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const QutritOperators ops = build_operators();
  const cplx q = quantum_expectation(mermin_operator(ops), DensityMatrix::pure(ideal_ghz()));
  o.require(std::abs(q - 9.0) <= kQuantumValueTol, "quantum value " + fmt(q.real()));
  const LrEnumeration lr = lr_enumerate();
  o.require(lr.count == 19683, "assignments " + std::to_string(lr.count));
  o.require(lr.max_modulus_sq == 36, "max |S|^2 " + std::to_string(lr.max_modulus_sq));
  o.require(lr.distinct_values.size() == 16, "distinct " + std::to_string(lr.distinct_values.size()));
  bool inside = true;
  for (const auto& v : lr.distinct_values) inside = inside && v.norm() <= 36;
  o.require(inside, "value outside radius 6");
  const auto table = concurrent_set_check(ops, ideal_ghz());
  const int expected[] = {0, 1, 2, 1, 1, 1, 1, 1, 1};
  bool eig = table.size() == 9;
  for (std::size_t i = 0; eig && i < table.size(); ++i) {
    eig = table[i].omega_exponent == expected[i] &&
          std::abs(table[i].eigenvalue - std::polar(1.0, 2.0 * std::numbers::pi * expected[i] / 3.0)) < 1e-10;
  }
  o.require(eig, "eigenvalue table");
  const double dt = seconds_since(t0);
  o.require(dt < kLimit6, "runtime " + fmt(dt));
  o.note("<O>=" + fmt(q.real()) + " |S|max^2=" + std::to_string(lr.max_modulus_sq) +
         " distinct=" + std::to_string(lr.distinct_values.size()) + " t=" + fmt(dt) + "s");
  return o;
}

Outcome noise_model_value() {
  Outcome o;
  const NoiseParams table{};
  const double closed = noise_expectation(table);
  const cplx tr = quantum_expectation(mermin_operator(build_operators()), noise_model(table));
  const double ideal = noise_expectation(NoiseParams{1.0, 1.0, 1.0, 1.0, 1.0});
  o.require(std::abs(closed - kNoiseTarget) <= kNoiseTol,
            "closed form " + fmt(closed) + " outside " + fmt(kNoiseTarget) + "+-" + fmt(kNoiseTol));
  o.require(std::abs(tr - closed) <= kTraceTol, "trace mismatch " + fmt(std::abs(tr - closed)));
  o.require(std::abs(ideal - 9.0) <= kTraceTol, "ideal " + fmt(ideal));
  o.note("closed=" + fmt(closed) + " trace=" + fmt(tr.real()) + " ideal=" + fmt(ideal));
  return o;
}

Outcome counting() {
  Outcome o;
  const double mu = mean_photon_number(13000, 0.44, 8e7);
  const double ratio = higher_order_ratio(mu, 0.44);
  o.require(std::abs(mu / kMuTarget - 1.0) <= kMuRelTol, "mu " + fmt(mu));
  o.require(std::abs(ratio / kRatioTarget - 1.0) <= kRatioRelTol, "ratio " + fmt(ratio));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
  int failures = 0;
  const std::string det = "ABCD";
  for (int trial = 0; trial < 1000; ++trial) {
    PairMap p;
    for (const auto& k : all_pairs()) p[k] = u01(rng);
    std::string perm = det;
    std::shuffle(perm.begin(), perm.end(), rng);
    PairMap q;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) q[pair_key(perm[i], perm[j])] = p.at(pair_key(det[i], det[j]));
    }
    if (!close(fourfold_probability(p), fourfold_probability(q))) ++failures;

    const double a = 1e6 * u01(rng), b = 1e6 * u01(rng), c = 1e6 * u01(rng), k = 0.1 + 10 * u01(rng);
    const double tau = 0.1 + u01(rng), rep = 1e6 + 1e8 * u01(rng);
    const double ab = accidental_pair(a, b, tau, rep);
    if (!close(ab, accidental_pair(b, a, tau, rep))) ++failures;
    if (!close(accidental_pair(k * a, b, tau, rep), k * ab)) ++failures;
    if (!close(accidental_pair(a + c, b, tau, rep), ab + accidental_pair(c, b, tau, rep))) ++failures;
    if (!close(accidental_pair(a, b, tau, k * rep), ab / k)) ++failures;

    PairMap acc, cc, acc2;
    for (const auto& key : all_pairs()) {
      acc[key] = u01(rng);
      cc[key] = u01(rng);
      acc2[key] = k * acc[key];
    }
    if (!close(accidental_fourfold(acc2, cc), k * accidental_fourfold(acc, cc))) ++failures;
    if (subtract(u01(rng), 2 * u01(rng)) < 0.0) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " property failures");
  o.note("mu=" + fmt(mu) + " ratio=" + fmt(ratio) + " draws=1000");
  return o;
}

Outcome calibration() {
  Outcome o;
  const auto recs = simulate_counts(noise_model(NoiseParams{}), witness_plan(), 1652, 20240611);
  const FidelityEstimate est = estimate_fidelity(recs, ideal_ghz(), 1000, derive_seed(20240611, 1));
  o.require(est.sigma >= kSigmaLow && est.sigma <= kSigmaHigh, "sigma " + fmt(est.sigma));
  o.note("F=" + fmt(est.fidelity) + " sigma_F=" + fmt(est.sigma));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty() || !fs::exists(cli)) {
    o.require(false, "CLI binary not found: " + cli);
    return o;
  }
  const fs::path root = fs::temp_directory_path() / "ghz3_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path rates = root / "rates.json";
  std::ofstream(rates) << R"({"rep_rate_hz": 8e7, "tau_int_s": 1, "eta": 0.44,
    "singles": {"A": 1e5, "B": 1e5, "C": 1e5, "D": 1e5},
    "pairs": {"AB": 13000, "CD": 13000, "AC": 100, "BD": 100, "AD": 100, "BC": 100},
    "fourfold_observed": 5, "pair_rate_hz": 13000})";
  const std::vector<std::string> commands{"simulate", "hom", "witness --seed 7", "mermin",
                                          "counts --config " + rates.string()};
  int compared = 0;
  for (const auto& cmd : commands) {
    const std::string name = cmd.substr(0, cmd.find(' '));
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / (name + std::to_string(run));
      dirs.push_back(dir);
      const std::string line = cli + " " + cmd + " --out " + dir.string() + " > /dev/null 2>&1";
      if (std::system(line.c_str()) != 0) o.require(false, name + " exited nonzero");
    }
    if (!fs::exists(dirs[0])) continue;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const fs::path other = dirs[1] / entry.path().filename();
      const bool same = fs::exists(other) && slurp(entry.path()) == slurp(other);
      o.require(same, name + "/" + entry.path().filename().string() + " differs");
      ++compared;
    }
  }
  o.require(compared >= 9, "only " + std::to_string(compared) + " files compared");
  o.note(std::to_string(compared) + " files byte-identical across runs");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int criterion = 0;
  std::string cli;
  app.add_option("--criterion", criterion, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--cli", cli, "Path to the command-line binary");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"GHZ generation", ghz_generation},
      {"term elimination", term_elimination},
      {"HOM model", hom_model},
      {"spectral numbers", spectral_numbers},
      {"witness", witness},
      {"contradiction", contradiction},
      {"noise model", noise_model_value},
      {"counting arithmetic", counting},
      {"statistical calibration", calibration},
      {"determinism", [&] { return determinism(cli); }},
  };

  bool ok = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (criterion != 0 && static_cast<int>(i) + 1 != criterion) continue;
    Outcome out;
    try {
      out = all[i].second();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, all[i].first.c_str(),
                out.detail.c_str());
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
