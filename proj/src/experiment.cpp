#include "ghz3/experiment.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>

#include "ghz3/errors.hpp"

namespace ghz3 {

namespace {

constexpr double kZeroProbability = 1e-12;

const PathId& path_a(const PipelineConfig& c) { return c.source1[0]; }
const PathId& path_b(const PipelineConfig& c) { return c.source1[1]; }
const PathId& path_c(const PipelineConfig& c) { return c.source2[0]; }
const PathId& path_d(const PipelineConfig& c) { return c.source2[1]; }

std::vector<ModeLabel> all_modes(const PipelineConfig& cfg) {
  std::vector<ModeLabel> modes;
  const ModeDomain dom = cfg.domain();
  for (const auto& p : {path_a(cfg), path_b(cfg), path_c(cfg), path_d(cfg)}) {
    auto m = dom.modes_on(p);
    modes.insert(modes.end(), m.begin(), m.end());
  }
  return modes;
}

LinearMap mirrors(const PipelineConfig& cfg, const std::map<std::string, int>& counts) {
  LinearMap map;
  for (const auto& [name, n] : counts) {
    if (n % 2 == 0) continue;
    map = map.entries().empty() ? mirror(name, cfg.domain()) : direct_sum(map, mirror(name, cfg.domain()));
  }
  return extend_with_identity(map, all_modes(cfg));
}

struct Propagation {
  PhotonicState after_sorter;
  PhotonicState output;  // before post-selection
};

Propagation propagate(const PipelineConfig& cfg, const PhotonicState& input) {
  const auto modes = all_modes(cfg);
  const ModeDomain dom = cfg.domain();
  Propagation p;
  PhotonicState s = apply(mirrors(cfg, cfg.source_mirrors), input);
  s = apply(extend_with_identity(parity_sorter(path_b(cfg), path_c(cfg), cfg.sorter, dom), modes), s);
  p.after_sorter = s;
  s = apply(extend_with_identity(spp_reflect(path_a(cfg), dom), modes), s);
  s = apply(extend_with_identity(beam_splitter(path_a(cfg), path_b(cfg), cfg.bs_oam, dom), modes), s);
  s = apply(mirrors(cfg, cfg.detector_mirrors), s);
  for (const auto& spec : cfg.extra_elements) s = apply(extend_with_identity(build(spec, dom), modes), s);
  p.output = std::move(s);
  return p;
}

PhotonicState sources(const PipelineConfig& cfg, int source2_tag) {
  PhotonicState s = spdc_state(cfg.source1, cfg.amps1, 0, cfg.include_c2);
  if (cfg.source2_enabled) s = tensor(s, spdc_state(cfg.source2, cfg.amps2, source2_tag, cfg.include_c2));
  return s;
}

PhotonicState postselected(const PipelineConfig& cfg, const PhotonicState& output) {
  const auto paths = cfg.detector_paths();
  const double norm2 = output.squared_norm();
  auto post = postselect(output, std::set<PathId>(paths.begin(), paths.end()));
  return post.state.scaled(std::sqrt(post.probability * norm2));
}

struct Evaluation {
  PhotonicState pre_cmp;  // unnormalized
  PhotonicState final_state;
  double fourfold = 0.0;
  double total = 0.0;
};

Evaluation evaluate(const PipelineConfig& cfg, const PhotonicState& input) {
  Evaluation e;
  e.pre_cmp = postselected(cfg, propagate(cfg, input).output);
  e.fourfold = e.pre_cmp.squared_norm();
  if (!cfg.include_cmp) {
    e.final_state = e.pre_cmp;
    e.total = e.fourfold;
    return e;
  }
  auto proj = project(cmp_plus(path_a(cfg)), e.pre_cmp);
  e.total = e.fourfold * proj.probability;
  e.final_state = proj.state.scaled(std::sqrt(e.total));
  return e;
}

}  // namespace

// --- sources -----------------------------------------------------------------

SourceAmplitudes SourceAmplitudes::balanced() { return {}; }

SourceAmplitudes SourceAmplitudes::from_ratios(double c0_over_c1, double c1_over_c2) {
  if (!(c0_over_c1 > 0.0) || c1_over_c2 < 0.0) throw std::invalid_argument("from_ratios: ratios must be positive");
  double c0 = c0_over_c1, c1 = 1.0;
  double c2 = c1_over_c2 > 0.0 ? 1.0 / c1_over_c2 : 0.0;
  double n = std::sqrt(c0 * c0 + 2 * c1 * c1 + 2 * c2 * c2);
  return {c0 / n, c1 / n, c2 / n};
}

void SourceAmplitudes::validate() const {
  if (c0 < 0 || c1 < 0 || c2 < 0) throw std::invalid_argument("SourceAmplitudes: negative amplitude");
  if (std::abs(c0 * c0 + 2 * c1 * c1 + 2 * c2 * c2 - 1.0) > 1e-12) {
    throw std::invalid_argument("SourceAmplitudes: c0^2 + 2c1^2 + 2c2^2 must be 1");
  }
}

PhotonicState spdc_state(const std::array<PathId, 2>& paths, const SourceAmplitudes& amps, int tag,
                         bool include_c2) {
  std::vector<FockTerm> terms;
  auto add = [&](double c, int l1, int l2) {
    if (c != 0.0) terms.push_back({c, {{paths[0], l1, tag}, {paths[1], l2, tag}}});
  };
  add(amps.c0, 0, 0);
  add(amps.c1, 1, -1);
  add(amps.c1, -1, 1);
  if (include_c2) {
    add(amps.c2, 2, -2);
    add(amps.c2, -2, 2);
  }
  return PhotonicState(terms).normalized();
}

// --- configuration -----------------------------------------------------------

void PipelineConfig::validate() const {
  std::set<PathId> paths{source1[0], source1[1], source2[0], source2[1]};
  if (paths.size() != 4) throw std::invalid_argument("PipelineConfig: paths must be distinct");
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("PipelineConfig: overlap outside [0,1]");
  if (max_oam < 4) throw std::invalid_argument("PipelineConfig: max_oam must be at least 4");
  amps1.validate();
  amps2.validate();
  for (const auto& spec : extra_elements) {
    spec.validate();
    for (const auto& p : spec.paths) {
      if (!paths.count(p)) throw std::invalid_argument("PipelineConfig: element on unknown path " + p.name);
    }
  }
  for (const auto* m : {&source_mirrors, &detector_mirrors}) {
    for (const auto& [name, n] : *m) {
      if (n < 0) throw std::invalid_argument("PipelineConfig: negative mirror count on " + name);
      if (!paths.count(PathId(name))) throw std::invalid_argument("PipelineConfig: mirror on unknown path " + name);
    }
  }
}

std::vector<PathId> PipelineConfig::detector_paths() const {
  if (!source2_enabled) return {source1[0], source1[1]};
  return {source1[0], source1[1], source2[0], source2[1]};
}

PipelineConfig detailed_setup_config() {
  PipelineConfig cfg;
  cfg.detector_mirrors = {{"B", 1}, {"D", 1}};
  return cfg;
}

// --- pipeline ----------------------------------------------------------------

PhotonicState fourfold_state(const PipelineConfig& cfg, int source2_tag) {
  cfg.validate();
  return postselected(cfg, propagate(cfg, sources(cfg, source2_tag)).output);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const double o = cfg.overlap;
  Evaluation same, dist;
  if (o > 0.0 || !cfg.source2_enabled) same = evaluate(cfg, sources(cfg, 0));
  if (o < 1.0 && cfg.source2_enabled) dist = evaluate(cfg, sources(cfg, 1));
  if (!cfg.source2_enabled) dist = same;

  PipelineResult r;
  r.fourfold_probability = o * same.fourfold + (1.0 - o) * dist.fourfold;
  r.probability = o * same.total + (1.0 - o) * dist.total;
  r.cmp_probability = r.fourfold_probability > 0.0 ? r.probability / r.fourfold_probability : 0.0;

  const Evaluation& shown = (o > 0.0) ? same : dist;
  r.pre_cmp = shown.pre_cmp.normalized();
  r.four_photon = shown.final_state.normalized();
  if (!r.four_photon.empty()) {
    auto split = split_photon(r.four_photon, path_a(cfg));
    r.a_state = split.first;
    r.bcd_state = split.rest;
    r.factorization_fidelity = split.coefficients.front() * split.coefficients.front();
  }
  return r;
}

SchmidtSplit split_photon(const PhotonicState& state, const PathId& path) {
  SchmidtSplit out;
  if (state.empty()) return out;
  const PhotonicState fock = state.in_convention(Convention::kNormalizedFock);
  std::map<ModeLabel, int> rows;
  std::map<Occupation, int> cols;
  std::vector<std::tuple<ModeLabel, Occupation, cplx>> entries;
  for (const auto& [occ, amp] : fock.terms()) {
    std::vector<ModeLabel> on_path;
    Occupation rest;
    for (const auto& m : occ) (m.path == path ? on_path : rest).push_back(m);
    if (on_path.size() != 1) throw std::invalid_argument("split_photon: need exactly one photon on " + path.name);
    rows.try_emplace(on_path[0], 0);
    cols.try_emplace(rest, 0);
    entries.emplace_back(on_path[0], rest, amp);
  }
  int i = 0;
  for (auto& [k, v] : rows) v = i++;
  i = 0;
  for (auto& [k, v] : cols) v = i++;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (const auto& [r, c, a] : entries) m(rows.at(r), cols.at(c)) = a;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const double total = std::sqrt(s.squaredNorm());
  for (Eigen::Index k = 0; k < s.size(); ++k) out.coefficients.push_back(s(k) / total);

  Eigen::VectorXcd u = svd.matrixU().col(0);
  Eigen::VectorXcd v = svd.matrixV().col(0).conjugate();
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (std::abs(u(k)) > 1e-12) {
      const cplx phase = std::polar(1.0, -std::arg(u(k)));
      u *= phase;
      v /= phase;
      break;
    }
  }
  std::vector<FockTerm> first, rest;
  for (const auto& [mode, k] : rows) {
    if (std::abs(u(k)) > kPruneThreshold) first.push_back({u(k), {mode}});
  }
  for (const auto& [occ, k] : cols) {
    if (std::abs(v(k)) > kPruneThreshold) rest.push_back({v(k), occ});
  }
  out.first = PhotonicState(first, Convention::kNormalizedFock).in_convention(state.convention());
  out.rest = PhotonicState(rest, Convention::kNormalizedFock).in_convention(state.convention());
  return out;
}

bool factorization_check(const PhotonicState& four_photon, const PhotonicState& a_state,
                         const PhotonicState& bcd_state) {
  if (four_photon.empty() || a_state.empty() || bcd_state.empty()) return false;
  const PhotonicState product = tensor(a_state.in_convention(four_photon.convention()),
                                       bcd_state.in_convention(four_photon.convention()));
  return fidelity_pure(four_photon.normalized(), product.normalized()) >= 1.0 - 1e-10;
}

bool factorization_check(const PipelineResult& result) {
  return factorization_check(result.four_photon, result.a_state, result.bcd_state);
}

// --- classification ----------------------------------------------------------

std::string to_string(SourceTerm t) {
  switch (t) {
    case SourceTerm::kEven: return "even";
    case SourceTerm::kOddPlus: return "odd+";
    case SourceTerm::kOddMinus: return "odd-";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kSurvives: return "SURVIVES";
    case Verdict::kParityBlocked: return "PARITY_BLOCKED";
    case Verdict::kCrossBlocked: return "CROSS_BLOCKED";
  }
  return "?";
}

std::array<int, 2> oam_pair(SourceTerm t) {
  switch (t) {
    case SourceTerm::kEven: return {0, 0};
    case SourceTerm::kOddPlus: return {1, -1};
    case SourceTerm::kOddMinus: return {-1, 1};
  }
  return {0, 0};
}

int TermClassification::count(Verdict v) const {
  return static_cast<int>(std::count_if(combos.begin(), combos.end(), [v](const auto& c) { return c.verdict == v; }));
}

const ComboResult& TermClassification::at(SourceTerm first, SourceTerm second) const {
  for (const auto& c : combos) {
    if (c.first == first && c.second == second) return c;
  }
  throw std::out_of_range("TermClassification: combo not present");
}

namespace {

ComboResult classify_one(const PipelineConfig& cfg, SourceTerm t1, SourceTerm t2) {
  auto single = [](const std::array<PathId, 2>& paths, SourceTerm t, int tag) {
    auto l = oam_pair(t);
    return PhotonicState{{1.0, {{paths[0], l[0], tag}, {paths[1], l[1], tag}}}};
  };
  const PhotonicState same = tensor(single(cfg.source1, t1, 0), single(cfg.source2, t2, 0));
  const PhotonicState dist = tensor(single(cfg.source1, t1, 0), single(cfg.source2, t2, 1));

  ComboResult r;
  r.first = t1;
  r.second = t2;

  // Paths C and D see no element after the sorter, so each must already hold
  // exactly one photon.
  const PhotonicState sorted = propagate(cfg, same).after_sorter;
  double parity_ok = 0.0;
  for (const auto& [occ, amp] : sorted.terms()) {
    int nc = 0, nd = 0;
    for (const auto& m : occ) {
      nc += m.path == path_c(cfg);
      nd += m.path == path_d(cfg);
    }
    if (nc == 1 && nd == 1) parity_ok += std::norm(amp);
  }

  const Evaluation e_same = evaluate(cfg, same);
  const Evaluation e_dist = evaluate(cfg, dist);
  r.probability_identical = e_same.total;
  r.probability_distinguishable = e_dist.total;
  r.hom_involved = std::abs(e_same.fourfold - e_dist.fourfold) > kZeroProbability;
  r.cmp_blocked = cfg.include_cmp && e_dist.fourfold > kZeroProbability && e_dist.total <= kZeroProbability;

  if (parity_ok <= kZeroProbability) {
    r.verdict = Verdict::kParityBlocked;
  } else if (r.probability_identical > kZeroProbability) {
    r.verdict = Verdict::kSurvives;
  } else {
    r.verdict = Verdict::kCrossBlocked;
  }
  return r;
}

}  // namespace

TermClassification classify_terms(const PipelineConfig& cfg) {
  cfg.validate();
  if (!cfg.source2_enabled) throw std::invalid_argument("classify_terms: needs both sources");
  const std::array<SourceTerm, 3> terms{SourceTerm::kEven, SourceTerm::kOddPlus, SourceTerm::kOddMinus};
  std::vector<std::future<ComboResult>> jobs;
  for (auto t1 : terms) {
    for (auto t2 : terms) jobs.push_back(std::async(std::launch::async, classify_one, std::cref(cfg), t1, t2));
  }
  TermClassification out;
  for (auto& j : jobs) out.combos.push_back(j.get());
  return out;
}

// --- HOM scan ----------------------------------------------------------------

std::array<Projector1, 4> hom_projectors() {
  return {Projector1::basis("A", -1), Projector1::basis("B", 1), Projector1::basis("C", -1),
          Projector1::basis("D", 1)};
}

std::vector<HomPoint> hom_scan(const PipelineConfig& cfg, const std::array<Projector1, 4>& projectors,
                               const std::vector<double>& overlaps) {
  for (double o : overlaps) {
    if (!(o >= 0.0 && o <= 1.0)) throw std::invalid_argument("hom_scan: overlap outside [0,1]");
  }
  auto detected = [&](int tag2) {
    PhotonicState s = fourfold_state(cfg, tag2);
    double p = s.squared_norm();
    for (const auto& proj : projectors) {
      if (p == 0.0) break;
      auto r = project(proj, s);
      p *= r.probability;
      s = r.state;
    }
    return p;
  };
  const double p_same = detected(0);
  const double p_dist = detected(1);
  std::vector<HomPoint> out;
  out.reserve(overlaps.size());
  for (double o : overlaps) out.push_back({o, o * p_same + (1.0 - o) * p_dist});
  return out;
}

// --- relabeling ----------------------------------------------------------------

PhotonicState GhzRelabeling::apply_to(const PhotonicState& state) const {
  std::vector<FockTerm> terms;
  for (const auto& [occ, amp] : state.terms()) {
    Occupation mapped;
    cplx a = amp;
    for (const auto& m : occ) {
      auto party = std::find_if(parties.begin(), parties.end(), [&](const auto& p) { return p.path == m.path; });
      if (party == parties.end()) throw UnsupportedMode("relabel: no party for path " + m.path.name);
      auto level = std::find(party->oam.begin(), party->oam.end(), m.oam);
      if (level == party->oam.end()) throw UnsupportedMode("relabel: OAM outside party basis at " + to_string(m));
      const auto k = static_cast<std::size_t>(level - party->oam.begin());
      a *= party->phase[k];
      mapped.push_back({m.path, static_cast<int>(k), m.tag});
    }
    terms.push_back({a, std::move(mapped)});
  }
  return PhotonicState(terms, state.convention());
}

GhzRelabeling declared_relabeling() {
  GhzRelabeling r;
  r.parties[0] = {"B", {2, 3, -1}, {1.0, 1.0, 1.0}};
  r.parties[1] = {"C", {0, 1, -1}, {1.0, 1.0, 1.0}};
  r.parties[2] = {"D", {0, 1, -1}, {1.0, 1.0, -1.0}};
  return r;
}

GhzRelabeling derive_relabeling(const PhotonicState& bcd, const std::array<PathId, 3>& paths) {
  if (bcd.size() != 3) throw std::invalid_argument("derive_relabeling: need a three-term state");
  struct Term {
    std::array<int, 3> oam;
    cplx amp;
  };
  std::vector<Term> terms;
  for (const auto& [occ, amp] : bcd.terms()) {
    Term t{{0, 0, 0}, amp};
    std::array<int, 3> seen{0, 0, 0};
    for (const auto& m : occ) {
      auto it = std::find(paths.begin(), paths.end(), m.path);
      if (it == paths.end()) throw std::invalid_argument("derive_relabeling: photon outside the parties");
      auto k = static_cast<std::size_t>(it - paths.begin());
      t.oam[k] = m.oam;
      ++seen[k];
    }
    if (seen != std::array<int, 3>{1, 1, 1}) throw std::invalid_argument("derive_relabeling: need one photon per party");
    terms.push_back(t);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    std::set<int> values{terms[0].oam[k], terms[1].oam[k], terms[2].oam[k]};
    if (values.size() != 3) throw std::invalid_argument("derive_relabeling: OAM values repeat within a party");
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return std::pair(std::abs(a.oam[2]), -a.oam[2]) < std::pair(std::abs(b.oam[2]), -b.oam[2]);
  });
  GhzRelabeling r;
  const cplx ref = terms[0].amp / std::abs(terms[0].amp);
  for (std::size_t p = 0; p < 3; ++p) {
    r.parties[p].path = paths[p];
    for (std::size_t k = 0; k < 3; ++k) r.parties[p].oam[k] = terms[k].oam[p];
  }
  for (std::size_t k = 0; k < 3; ++k) r.parties[2].phase[k] = ref * std::abs(terms[k].amp) / terms[k].amp;
  return r;
}

PhotonicState ghz_state(const std::array<PathId, 3>& paths, const std::array<double, 3>& weights) {
  std::vector<FockTerm> terms;
  for (int k = 0; k < 3; ++k) {
    if (weights[k] != 0.0) terms.push_back({weights[k], {{paths[0], k, 0}, {paths[1], k, 0}, {paths[2], k, 0}}});
  }
  if (terms.empty()) throw std::invalid_argument("ghz_state: all weights zero");
  return PhotonicState(terms).normalized();
}

namespace {

PhotonicState three_terms(const std::array<std::array<int, 3>, 3>& oam) {
  const double a = 1.0 / std::sqrt(3.0);
  std::vector<FockTerm> terms;
  for (const auto& t : oam) terms.push_back({a, {{"B", t[0], 0}, {"C", t[1], 0}, {"D", t[2], 0}}});
  return PhotonicState(terms);
}

}  // namespace

PhotonicState target_state() { return three_terms({{{2, 0, 0}, {3, 1, 1}, {-1, -1, -1}}}); }

PhotonicState detailed_setup_target() { return three_terms({{{-2, 0, 0}, {-3, 1, -1}, {1, -1, 1}}}); }

}  // namespace ghz3
