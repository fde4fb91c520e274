#pragma once

// Multi-photon states over labelled optical modes.
//
// A PhotonicState is a polynomial in creation operators acting on the vacuum.
// Amplitudes are stored as monomial coefficients; the 1/sqrt(n!) Fock
// normalization is applied only when an amplitude is extracted in the
// normalized-fock convention. Linear optical elements act by substituting each
// creation operator with a superposition of creation operators (see apply()).

#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ghz3 {

using cplx = std::complex<double>;

inline constexpr int kDefaultMaxOam = 5;
inline constexpr double kPruneThreshold = 1e-14;

// Symbolic path identifier ("A", "B", "A'", ...).
struct PathId {
  std::string name;

  PathId() = default;
  PathId(std::string n) : name(std::move(n)) {}
  PathId(const char* n) : name(n) {}

  auto operator<=>(const PathId&) const = default;
};

// Canonical order is lexicographic in (path, oam, tag).
struct ModeLabel {
  PathId path;
  int oam = 0;
  int tag = 0;

  auto operator<=>(const ModeLabel&) const = default;
};

std::string to_string(const ModeLabel& m);

// Sorted multiset of modes; one entry per photon.
using Occupation = std::vector<ModeLabel>;

Occupation make_occupation(std::vector<ModeLabel> modes);

enum class Convention { kMonomial, kNormalizedFock };

// prod_m sqrt(n_m!) over the repeated modes of an occupation.
double fock_factor(const Occupation& occ);

struct FockTerm {
  cplx amplitude;
  Occupation occupation;
};

class PhotonicState {
 public:
  using TermMap = std::map<Occupation, cplx>;

  // Empty state (no terms, zero norm).
  PhotonicState() = default;

  // Terms are canonicalized and merged; zero amplitudes are dropped. Throws
  // std::invalid_argument when photon numbers differ between terms.
  PhotonicState(std::initializer_list<FockTerm> terms,
                Convention convention = Convention::kMonomial);
  explicit PhotonicState(const std::vector<FockTerm>& terms,
                         Convention convention = Convention::kMonomial);

  static PhotonicState vacuum(Convention convention = Convention::kMonomial);

  const TermMap& terms() const { return terms_; }
  Convention convention() const { return convention_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Photon number shared by all terms; 0 for the vacuum and the empty state.
  int photon_number() const;

  // Paths carrying at least one photon in some term.
  std::set<PathId> occupied_paths() const;

  // Squared norm with the Fock normalization applied.
  double squared_norm() const;

  PhotonicState normalized() const;
  PhotonicState in_convention(Convention target) const;
  PhotonicState scaled(cplx factor) const;

  friend bool operator==(const PhotonicState&, const PhotonicState&) = default;

 private:
  void insert(Occupation occ, cplx amplitude);

  TermMap terms_;
  Convention convention_ = Convention::kMonomial;
};

// Linear optical element: mode -> superposition of modes.
class LinearMap {
 public:
  using Image = std::vector<std::pair<ModeLabel, cplx>>;
  using Entries = std::map<ModeLabel, Image>;

  LinearMap() = default;
  LinearMap(Entries entries, bool unitary);

  static LinearMap identity(const std::vector<ModeLabel>& modes);

  const Entries& entries() const { return entries_; }
  bool unitary() const { return unitary_; }
  bool supports(const ModeLabel& m) const { return entries_.count(m) != 0; }
  const Image& image(const ModeLabel& m) const;

  // Column orthonormality over the support: <col_a, col_b> = delta_ab.
  bool is_column_orthonormal(double tol = 1e-12) const;

  // Restricted copy; throws UnsupportedMode if a requested mode is missing.
  LinearMap restricted(const std::vector<ModeLabel>& modes) const;

 private:
  Entries entries_;
  bool unitary_ = false;
};

// (outer . inner): inner is applied first. The result is unitary-flagged when
// both operands are.
LinearMap compose(const LinearMap& outer, const LinearMap& inner);

// Union of two maps with disjoint supports.
LinearMap direct_sum(const LinearMap& a, const LinearMap& b);

// Adds identity entries for every mode of `modes` not already supported.
LinearMap extend_with_identity(const LinearMap& map,
                               const std::vector<ModeLabel>& modes);

PhotonicState apply(const LinearMap& map, const PhotonicState& state);

PhotonicState tensor(const PhotonicState& s1, const PhotonicState& s2);

struct PostSelection {
  PhotonicState state;  // renormalized; empty when probability == 0
  double probability = 0.0;
};

// Keeps terms with exactly one photon in each detector path and none
// elsewhere.
PostSelection postselect(const PhotonicState& state,
                         const std::set<PathId>& detector_paths);

cplx amplitude(const PhotonicState& state, const Occupation& occupation,
               Convention convention = Convention::kNormalizedFock);

// <s1|s2> in the normalized-fock convention.
cplx inner_product(const PhotonicState& s1, const PhotonicState& s2);

double fidelity_pure(const PhotonicState& s1, const PhotonicState& s2);

}  // namespace ghz3
