#pragma once

// Linear optical elements of the multi-port and the detection stage.

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "ghz3/photonic.hpp"

namespace ghz3 {

// Modes a factory covers: every tag in `tags` and every |l| <= max_oam.
struct ModeDomain {
  int max_oam = kDefaultMaxOam;
  std::vector<int> tags{0, 1};

  std::vector<ModeLabel> modes_on(const PathId& path) const;
};

// Reflection followed by a spiral phase plate: l -> -l + charge. Supported on
// |l| <= max_oam - |charge| so the image stays inside the domain.
LinearMap spp_reflect(const PathId& path, const ModeDomain& domain = {}, int charge = 2);

// Plain reflection: l -> -l.
LinearMap mirror(const PathId& path, const ModeDomain& domain = {});

enum class BeamSplitterOam {
  kPreserve,       // both outputs keep l
  kReflectionFlips // the reflected output carries -l (mirror image)
};

// Symmetric 50/50 splitter. Transmission crosses to the other path with
// coefficient 1/sqrt2, reflection stays on the same path label with i/sqrt2:
//   p1 -> (p2 + i p1)/sqrt2,   p2 -> (p1 + i p2)/sqrt2.
LinearMap beam_splitter(const PathId& p1, const PathId& p2,
                        BeamSplitterOam oam = BeamSplitterOam::kPreserve,
                        const ModeDomain& domain = {});

struct SorterConvention {
  enum class Routing { kEvenStays, kEvenSwaps };
  // kReal: every amplitude +1. kQuadrature: photons crossing p1->p2 pick up
  // +i and p2->p1 pick up -i.
  enum class Phase { kReal, kQuadrature };

  Routing routing = Routing::kEvenStays;
  Phase phase = Phase::kReal;

  friend bool operator==(const SorterConvention&, const SorterConvention&) = default;
};

std::array<SorterConvention, 4> all_sorter_conventions();
std::string to_string(const SorterConvention& c);

// Parity sorter between two paths. l is never changed, only the path.
LinearMap parity_sorter(const PathId& p1, const PathId& p2,
                        const SorterConvention& convention = {},
                        const ModeDomain& domain = {});

// Throws NotUnitary when ||U^dagger U - I||_max > tol.
void check_unitary(const Eigen::Matrix3cd& u, double tol = 1e-10);

// Acts with `u` on span{|basis[0]>, |basis[1]>, |basis[2]>} of `path`,
// identity on the remaining OAM values.
LinearMap local_unitary(const PathId& path, const Eigen::Matrix3cd& u,
                        const std::array<int, 3>& basis,
                        const ModeDomain& domain = {});

// Renames a path; (from, l, t) -> (to, l, t).
LinearMap relabel(const PathId& from, const PathId& to, const ModeDomain& domain = {});

// Single-photon projection state on one path.
class Projector1 {
 public:
  using Ket = std::vector<std::pair<int, cplx>>;

  // Throws std::invalid_argument unless sum |c|^2 == 1 within 1e-12.
  Projector1(PathId path, Ket ket);
  // Normalizes the supplied coefficients.
  static Projector1 normalized(PathId path, Ket ket);
  static Projector1 basis(PathId path, int oam);

  const PathId& path() const { return path_; }
  const Ket& ket() const { return ket_; }

 private:
  PathId path_;
  Ket ket_;
};

// Coherent-mode projection onto (|0> + |-1>)/sqrt2.
Projector1 cmp_plus(const PathId& path);

struct Projection {
  PhotonicState state;  // renormalized conditional state
  double probability = 0.0;
};

// Applies |k><k| to every photon on proj.path(); the photon remains in |k>.
Projection project(const Projector1& proj, const PhotonicState& state);

// ---- serializable element description --------------------------------------

enum class ElementKind { kSppReflect, kMirror, kBeamSplitter, kParitySorter, kLocalUnitary, kRelabel };

struct ElementSpec {
  ElementKind kind = ElementKind::kMirror;
  std::vector<PathId> paths;
  // Kind-specific:
  int spp_charge = 2;
  BeamSplitterOam bs_oam = BeamSplitterOam::kPreserve;
  SorterConvention sorter;
  Eigen::Matrix3cd unitary = Eigen::Matrix3cd::Identity();
  std::array<int, 3> unitary_basis{0, 1, 2};

  // Throws std::invalid_argument on an empty path list or a wrong arity.
  void validate() const;
};

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& s);

LinearMap build(const ElementSpec& spec, const ModeDomain& domain = {});

}  // namespace ghz3
