#include "ghz3/elements.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "ghz3/errors.hpp"

namespace ghz3 {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const cplx kI{0.0, 1.0};

bool is_even(int l) { return (std::abs(l) % 2) == 0; }

}  // namespace

std::vector<ModeLabel> ModeDomain::modes_on(const PathId& path) const {
  std::vector<ModeLabel> out;
  for (int t : tags) {
    for (int l = -max_oam; l <= max_oam; ++l) out.push_back({path, l, t});
  }
  return out;
}

LinearMap spp_reflect(const PathId& path, const ModeDomain& domain, int charge) {
  LinearMap::Entries e;
  const int reach = domain.max_oam - std::abs(charge);
  for (int t : domain.tags) {
    for (int l = -reach; l <= reach; ++l) e[{path, l, t}] = {{{path, -l + charge, t}, 1.0}};
  }
  return LinearMap(std::move(e), true);
}

LinearMap mirror(const PathId& path, const ModeDomain& domain) {
  LinearMap::Entries e;
  for (const auto& m : domain.modes_on(path)) e[m] = {{{path, -m.oam, m.tag}, 1.0}};
  return LinearMap(std::move(e), true);
}

LinearMap beam_splitter(const PathId& p1, const PathId& p2, BeamSplitterOam oam,
                        const ModeDomain& domain) {
  if (p1 == p2) throw std::invalid_argument("beam_splitter: identical paths");
  LinearMap::Entries e;
  for (const auto& [in, other] : {std::pair{p1, p2}, std::pair{p2, p1}}) {
    for (const auto& m : domain.modes_on(in)) {
      int reflected = (oam == BeamSplitterOam::kReflectionFlips) ? -m.oam : m.oam;
      e[m] = {{{other, m.oam, m.tag}, kInvSqrt2}, {{in, reflected, m.tag}, kI * kInvSqrt2}};
    }
  }
  return LinearMap(std::move(e), true);
}

std::array<SorterConvention, 4> all_sorter_conventions() {
  using R = SorterConvention::Routing;
  using P = SorterConvention::Phase;
  return {SorterConvention{R::kEvenStays, P::kReal}, SorterConvention{R::kEvenStays, P::kQuadrature},
          SorterConvention{R::kEvenSwaps, P::kReal}, SorterConvention{R::kEvenSwaps, P::kQuadrature}};
}

std::string to_string(const SorterConvention& c) {
  std::string s = c.routing == SorterConvention::Routing::kEvenStays ? "even_stays" : "even_swaps";
  s += c.phase == SorterConvention::Phase::kReal ? "/real" : "/quadrature";
  return s;
}

LinearMap parity_sorter(const PathId& p1, const PathId& p2, const SorterConvention& convention,
                        const ModeDomain& domain) {
  if (p1 == p2) throw std::invalid_argument("parity_sorter: identical paths");
  const bool even_stays = convention.routing == SorterConvention::Routing::kEvenStays;
  const bool quadrature = convention.phase == SorterConvention::Phase::kQuadrature;
  LinearMap::Entries e;
  for (const auto& [in, other, cross_phase] :
       {std::tuple{p1, p2, kI}, std::tuple{p2, p1, -kI}}) {
    for (const auto& m : domain.modes_on(in)) {
      bool swaps = is_even(m.oam) != even_stays;
      if (swaps) {
        e[m] = {{{other, m.oam, m.tag}, quadrature ? cross_phase : cplx(1.0)}};
      } else {
        e[m] = {{m, 1.0}};
      }
    }
  }
  return LinearMap(std::move(e), true);
}

void check_unitary(const Eigen::Matrix3cd& u, double tol) {
  const Eigen::Matrix3cd d = u.adjoint() * u - Eigen::Matrix3cd::Identity();
  if (d.cwiseAbs().maxCoeff() > tol) throw NotUnitary("local_unitary: matrix is not unitary");
}

LinearMap local_unitary(const PathId& path, const Eigen::Matrix3cd& u,
                        const std::array<int, 3>& basis, const ModeDomain& domain) {
  check_unitary(u);
  if (basis[0] == basis[1] || basis[0] == basis[2] || basis[1] == basis[2]) {
    throw std::invalid_argument("local_unitary: basis labels must be distinct");
  }
  LinearMap::Entries e;
  for (const auto& m : domain.modes_on(path)) e[m] = {{m, 1.0}};
  for (int t : domain.tags) {
    for (int col = 0; col < 3; ++col) {
      LinearMap::Image img;
      for (int row = 0; row < 3; ++row) {
        if (std::abs(u(row, col)) > kPruneThreshold) img.emplace_back(ModeLabel{path, basis[row], t}, u(row, col));
      }
      e[{path, basis[col], t}] = std::move(img);
    }
  }
  return LinearMap(std::move(e), true);
}

LinearMap relabel(const PathId& from, const PathId& to, const ModeDomain& domain) {
  LinearMap::Entries e;
  for (const auto& m : domain.modes_on(from)) e[m] = {{{to, m.oam, m.tag}, 1.0}};
  return LinearMap(std::move(e), true);
}

// --- projectors --------------------------------------------------------------

Projector1::Projector1(PathId path, Ket ket) : path_(std::move(path)), ket_(std::move(ket)) {
  double n2 = 0.0;
  for (const auto& [l, c] : ket_) n2 += std::norm(c);
  if (std::abs(n2 - 1.0) > 1e-12) throw std::invalid_argument("Projector1: ket is not normalized");
}

Projector1 Projector1::normalized(PathId path, Ket ket) {
  double n2 = 0.0;
  for (const auto& [l, c] : ket) n2 += std::norm(c);
  if (n2 == 0.0) throw std::invalid_argument("Projector1: zero ket");
  for (auto& [l, c] : ket) c /= std::sqrt(n2);
  return Projector1(std::move(path), std::move(ket));
}

Projector1 Projector1::basis(PathId path, int oam) { return Projector1(std::move(path), {{oam, 1.0}}); }

Projector1 cmp_plus(const PathId& path) { return Projector1(path, {{0, kInvSqrt2}, {-1, kInvSqrt2}}); }

Projection project(const Projector1& proj, const PhotonicState& state) {
  // Rank-one map |k><k| on every photon of the projected path.
  LinearMap::Entries e;
  for (const auto& [occ, amp] : state.terms()) {
    for (const auto& m : occ) {
      if (e.count(m)) continue;
      if (m.path != proj.path()) {
        e[m] = {{m, 1.0}};
        continue;
      }
      cplx overlap = 0.0;
      for (const auto& [l, c] : proj.ket()) {
        if (l == m.oam) overlap += std::conj(c);
      }
      LinearMap::Image img;
      if (overlap != cplx(0.0)) {
        for (const auto& [l, c] : proj.ket()) img.emplace_back(ModeLabel{m.path, l, m.tag}, overlap * c);
      }
      e[m] = std::move(img);
    }
  }
  const double before = state.squared_norm();
  PhotonicState out = apply(LinearMap(std::move(e), false), state);
  double p = before > 0.0 ? out.squared_norm() / before : 0.0;
  if (p == 0.0) return {PhotonicState{}, 0.0};
  return {out.normalized(), p};
}

// --- ElementSpec -------------------------------------------------------------

void ElementSpec::validate() const {
  if (paths.empty()) throw std::invalid_argument("ElementSpec: no paths");
  const bool two = kind == ElementKind::kBeamSplitter || kind == ElementKind::kParitySorter ||
                   kind == ElementKind::kRelabel;
  if (two && paths.size() != 2) throw std::invalid_argument("ElementSpec: element needs exactly 2 paths");
  if (!two && paths.size() != 1) throw std::invalid_argument("ElementSpec: element needs exactly 1 path");
}

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::kSppReflect: return "SPP_REFLECT";
    case ElementKind::kMirror: return "MIRROR";
    case ElementKind::kBeamSplitter: return "BEAM_SPLITTER";
    case ElementKind::kParitySorter: return "PARITY_SORTER";
    case ElementKind::kLocalUnitary: return "LOCAL_UNITARY";
    case ElementKind::kRelabel: return "RELABEL";
  }
  return "?";
}

ElementKind element_kind_from_string(const std::string& s) {
  for (auto k : {ElementKind::kSppReflect, ElementKind::kMirror, ElementKind::kBeamSplitter,
                 ElementKind::kParitySorter, ElementKind::kLocalUnitary, ElementKind::kRelabel}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown element kind '" + s + "'");
}

LinearMap build(const ElementSpec& spec, const ModeDomain& domain) {
  spec.validate();
  const auto& p = spec.paths;
  switch (spec.kind) {
    case ElementKind::kSppReflect: return spp_reflect(p[0], domain, spec.spp_charge);
    case ElementKind::kMirror: return mirror(p[0], domain);
    case ElementKind::kBeamSplitter: return beam_splitter(p[0], p[1], spec.bs_oam, domain);
    case ElementKind::kParitySorter: return parity_sorter(p[0], p[1], spec.sorter, domain);
    case ElementKind::kLocalUnitary: return local_unitary(p[0], spec.unitary, spec.unitary_basis, domain);
    case ElementKind::kRelabel: return relabel(p[0], p[1], domain);
  }
  throw std::logic_error("unreachable");
}

}  // namespace ghz3
