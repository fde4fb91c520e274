#include "ghz3/photonic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ghz3/errors.hpp"

namespace ghz3 {

std::string to_string(const ModeLabel& m) {
  std::ostringstream os;
  os << m.path.name << "(" << m.oam;
  if (m.tag != 0) os << ",t" << m.tag;
  os << ")";
  return os.str();
}

Occupation make_occupation(std::vector<ModeLabel> modes) {
  std::sort(modes.begin(), modes.end());
  return modes;
}

double fock_factor(const Occupation& occ) {
  double factor = 1.0;
  std::size_t i = 0;
  while (i < occ.size()) {
    std::size_t j = i;
    while (j < occ.size() && occ[j] == occ[i]) ++j;
    double fact = 1.0;
    for (std::size_t k = 2; k <= j - i; ++k) fact *= static_cast<double>(k);
    factor *= std::sqrt(fact);
    i = j;
  }
  return factor;
}

PhotonicState::PhotonicState(std::initializer_list<FockTerm> terms,
                             Convention convention)
    : PhotonicState(std::vector<FockTerm>(terms), convention) {}

PhotonicState::PhotonicState(const std::vector<FockTerm>& terms,
                             Convention convention)
    : convention_(convention) {
  for (const auto& t : terms) insert(make_occupation(t.occupation), t.amplitude);
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) <= kPruneThreshold; });
  int n = -1;
  for (const auto& [occ, amp] : terms_) {
    if (n >= 0 && static_cast<int>(occ.size()) != n) {
      throw std::invalid_argument("PhotonicState: mixed photon numbers");
    }
    n = static_cast<int>(occ.size());
  }
}

PhotonicState PhotonicState::vacuum(Convention convention) {
  return PhotonicState({FockTerm{1.0, {}}}, convention);
}

void PhotonicState::insert(Occupation occ, cplx amplitude) {
  auto [it, inserted] = terms_.try_emplace(std::move(occ), amplitude);
  if (!inserted) it->second += amplitude;
  if (std::abs(it->second) == 0.0) terms_.erase(it);
}

int PhotonicState::photon_number() const {
  return terms_.empty() ? 0 : static_cast<int>(terms_.begin()->first.size());
}

std::set<PathId> PhotonicState::occupied_paths() const {
  std::set<PathId> paths;
  for (const auto& [occ, amp] : terms_) {
    for (const auto& m : occ) paths.insert(m.path);
  }
  return paths;
}

double PhotonicState::squared_norm() const {
  double sum = 0.0;
  for (const auto& [occ, amp] : terms_) {
    double a = std::norm(amp);
    if (convention_ == Convention::kMonomial) {
      double f = fock_factor(occ);
      a *= f * f;
    }
    sum += a;
  }
  return sum;
}

PhotonicState PhotonicState::scaled(cplx factor) const {
  PhotonicState out;
  out.convention_ = convention_;
  if (factor == cplx(0.0)) return out;
  for (const auto& [occ, amp] : terms_) out.terms_.emplace(occ, amp * factor);
  return out;
}

PhotonicState PhotonicState::normalized() const {
  double n2 = squared_norm();
  if (n2 == 0.0) return *this;
  return scaled(1.0 / std::sqrt(n2));
}

PhotonicState PhotonicState::in_convention(Convention target) const {
  if (target == convention_) return *this;
  PhotonicState out;
  out.convention_ = target;
  for (const auto& [occ, amp] : terms_) {
    double f = fock_factor(occ);
    out.terms_.emplace(occ, target == Convention::kNormalizedFock ? amp * f : amp / f);
  }
  return out;
}

// --- LinearMap ---------------------------------------------------------------

LinearMap::LinearMap(Entries entries, bool unitary)
    : entries_(std::move(entries)), unitary_(unitary) {}

LinearMap LinearMap::identity(const std::vector<ModeLabel>& modes) {
  Entries e;
  for (const auto& m : modes) e[m] = {{m, 1.0}};
  return LinearMap(std::move(e), true);
}

const LinearMap::Image& LinearMap::image(const ModeLabel& m) const {
  auto it = entries_.find(m);
  if (it == entries_.end()) {
    throw UnsupportedMode("mode " + to_string(m) + " is outside the map's support");
  }
  return it->second;
}

bool LinearMap::is_column_orthonormal(double tol) const {
  std::vector<std::map<ModeLabel, cplx>> cols;
  cols.reserve(entries_.size());
  for (const auto& [in, img] : entries_) {
    std::map<ModeLabel, cplx> col;
    for (const auto& [out, c] : img) col[out] += c;
    cols.push_back(std::move(col));
  }
  for (std::size_t a = 0; a < cols.size(); ++a) {
    for (std::size_t b = a; b < cols.size(); ++b) {
      cplx dot = 0.0;
      for (const auto& [mode, ca] : cols[a]) {
        auto it = cols[b].find(mode);
        if (it != cols[b].end()) dot += std::conj(ca) * it->second;
      }
      cplx expected = (a == b) ? 1.0 : 0.0;
      if (std::abs(dot - expected) > tol) return false;
    }
  }
  return true;
}

LinearMap LinearMap::restricted(const std::vector<ModeLabel>& modes) const {
  Entries e;
  for (const auto& m : modes) e[m] = image(m);
  return LinearMap(std::move(e), false);
}

LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
  LinearMap::Entries e;
  for (const auto& [in, img] : inner.entries()) {
    std::map<ModeLabel, cplx> acc;
    for (const auto& [mid, c1] : img) {
      for (const auto& [out, c2] : outer.image(mid)) acc[out] += c1 * c2;
    }
    LinearMap::Image result;
    for (const auto& [out, c] : acc) {
      if (std::abs(c) > kPruneThreshold) result.emplace_back(out, c);
    }
    e[in] = std::move(result);
  }
  return LinearMap(std::move(e), outer.unitary() && inner.unitary());
}

LinearMap direct_sum(const LinearMap& a, const LinearMap& b) {
  LinearMap::Entries e = a.entries();
  for (const auto& [m, img] : b.entries()) {
    if (!e.emplace(m, img).second) {
      throw std::invalid_argument("direct_sum: overlapping support at " + to_string(m));
    }
  }
  return LinearMap(std::move(e), a.unitary() && b.unitary());
}

LinearMap extend_with_identity(const LinearMap& map,
                               const std::vector<ModeLabel>& modes) {
  LinearMap::Entries e = map.entries();
  for (const auto& m : modes) e.try_emplace(m, LinearMap::Image{{m, 1.0}});
  return LinearMap(std::move(e), map.unitary());
}

// --- state operations --------------------------------------------------------

namespace {

Occupation with_mode(const Occupation& occ, const ModeLabel& m) {
  Occupation out;
  out.reserve(occ.size() + 1);
  auto pos = std::upper_bound(occ.begin(), occ.end(), m);
  out.insert(out.end(), occ.begin(), pos);
  out.push_back(m);
  out.insert(out.end(), pos, occ.end());
  return out;
}

}  // namespace

PhotonicState apply(const LinearMap& map, const PhotonicState& state) {
  // Substitution acts on monomial coefficients.
  const PhotonicState mono = state.in_convention(Convention::kMonomial);
  std::map<Occupation, cplx> out;
  for (const auto& [occ, amp] : mono.terms()) {
    std::map<Occupation, cplx> partial{{Occupation{}, amp}};
    for (const auto& m : occ) {
      const auto& img = map.image(m);
      std::map<Occupation, cplx> next;
      for (const auto& [p, a] : partial) {
        for (const auto& [target, c] : img) next[with_mode(p, target)] += a * c;
      }
      partial = std::move(next);
    }
    for (const auto& [p, a] : partial) out[p] += a;
  }
  std::vector<FockTerm> terms;
  terms.reserve(out.size());
  for (const auto& [occ, amp] : out) {
    if (std::abs(amp) > kPruneThreshold) terms.push_back({amp, occ});
  }
  return PhotonicState(terms, Convention::kMonomial).in_convention(state.convention());
}

PhotonicState tensor(const PhotonicState& s1, const PhotonicState& s2) {
  if (s1.convention() != s2.convention()) {
    throw std::invalid_argument("tensor: convention mismatch");
  }
  auto p1 = s1.occupied_paths();
  for (const auto& p : s2.occupied_paths()) {
    if (p1.count(p)) throw PathCollision("tensor: path " + p.name + " occupied in both states");
  }
  std::vector<FockTerm> terms;
  terms.reserve(s1.size() * s2.size());
  for (const auto& [o1, a1] : s1.terms()) {
    for (const auto& [o2, a2] : s2.terms()) {
      Occupation occ = o1;
      occ.insert(occ.end(), o2.begin(), o2.end());
      terms.push_back({a1 * a2, std::move(occ)});
    }
  }
  return PhotonicState(terms, s1.convention());
}

PostSelection postselect(const PhotonicState& state,
                         const std::set<PathId>& detector_paths) {
  const double total = state.squared_norm();
  std::vector<FockTerm> kept;
  for (const auto& [occ, amp] : state.terms()) {
    if (occ.size() != detector_paths.size()) continue;
    std::set<PathId> seen;
    bool ok = true;
    for (const auto& m : occ) {
      if (!detector_paths.count(m.path) || !seen.insert(m.path).second) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back({amp, occ});
  }
  PhotonicState selected(kept, state.convention());
  double p = (total > 0.0) ? selected.squared_norm() / total : 0.0;
  if (p == 0.0) return {PhotonicState{}, 0.0};
  return {selected.normalized(), p};
}

cplx amplitude(const PhotonicState& state, const Occupation& occupation,
               Convention convention) {
  Occupation occ = make_occupation(occupation);
  auto it = state.terms().find(occ);
  if (it == state.terms().end()) return 0.0;
  cplx a = it->second;
  if (state.convention() == convention) return a;
  double f = fock_factor(occ);
  return convention == Convention::kNormalizedFock ? a * f : a / f;
}

cplx inner_product(const PhotonicState& s1, const PhotonicState& s2) {
  const auto f1 = s1.in_convention(Convention::kNormalizedFock);
  const auto f2 = s2.in_convention(Convention::kNormalizedFock);
  cplx sum = 0.0;
  for (const auto& [occ, a] : f1.terms()) {
    auto it = f2.terms().find(occ);
    if (it != f2.terms().end()) sum += std::conj(a) * it->second;
  }
  return sum;
}

double fidelity_pure(const PhotonicState& s1, const PhotonicState& s2) {
  for (const auto* s : {&s1, &s2}) {
    if (std::abs(s->squared_norm() - 1.0) > 1e-9) {
      throw NotNormalized("fidelity_pure: state norm deviates from 1");
    }
  }
  return std::clamp(std::norm(inner_product(s1, s2)), 0.0, 1.0);
}

}  // namespace ghz3
