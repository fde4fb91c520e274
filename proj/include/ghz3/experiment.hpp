#pragma once

// Two pair sources feeding the four-path multi-port, four-fold post-selection
// and the coherent-mode projection of path A.
//
// Stage order (paths A,B from source 1 and C,D from source 2):
//   source mirrors -> parity sorter (B,C) -> reflection + SPP (A)
//   -> beam splitter (A,B) -> detector mirrors -> extra elements
//   -> one photon per path -> CMP on A.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ghz3/elements.hpp"
#include "ghz3/photonic.hpp"

namespace ghz3 {

// Pair amplitudes c0|0,0> + c1(|1,-1> + |-1,1>) + c2(|2,-2> + |-2,2>).
struct SourceAmplitudes {
  double c0 = 1.0 / 1.7320508075688772;
  double c1 = 1.0 / 1.7320508075688772;
  double c2 = 0.0;

  static SourceAmplitudes balanced();
  // c0:c1 = c0_over_c1 and c1:c2 = c1_over_c2 (0 disables c2), normalized.
  static SourceAmplitudes from_ratios(double c0_over_c1, double c1_over_c2 = 0.0);

  // Throws std::invalid_argument for negative values or a norm off by >1e-12.
  void validate() const;
};

PhotonicState spdc_state(const std::array<PathId, 2>& paths, const SourceAmplitudes& amps,
                         int tag = 0, bool include_c2 = false);

struct PipelineConfig {
  std::array<PathId, 2> source1{PathId("A"), PathId("B")};
  std::array<PathId, 2> source2{PathId("C"), PathId("D")};
  SourceAmplitudes amps1;
  SourceAmplitudes amps2;
  // Reflection counts per path name, inserted right after the sources and
  // right before the detectors respectively.
  std::map<std::string, int> source_mirrors;
  std::map<std::string, int> detector_mirrors;
  // Applied in order after the detector mirrors.
  std::vector<ElementSpec> extra_elements;
  SorterConvention sorter;
  BeamSplitterOam bs_oam = BeamSplitterOam::kReflectionFlips;
  double overlap = 1.0;  // spectral overlap of photons from different sources
  bool include_c2 = false;
  bool include_cmp = true;
  bool source2_enabled = true;
  int max_oam = kDefaultMaxOam;

  // Throws std::invalid_argument on overlapping paths, o outside [0,1],
  // negative mirror counts or mirrors on unknown paths.
  void validate() const;

  std::vector<PathId> detector_paths() const;
  ModeDomain domain() const { return {max_oam, {0, 1}}; }
};

// Detailed-setup layout: one extra reflection in front of detectors B and D.
PipelineConfig detailed_setup_config();

struct PipelineResult {
  PhotonicState pre_cmp;      // normalized four-fold state before the CMP
  PhotonicState four_photon;  // normalized four-fold state after the CMP
  PhotonicState a_state;      // photon A, leading Schmidt vector
  PhotonicState bcd_state;    // photons B,C,D, leading Schmidt vector
  // Probabilities are convex mixtures over the overlap o of the identical
  // and the source-distinguishable evaluations.
  double fourfold_probability = 0.0;
  double cmp_probability = 0.0;  // conditional on the four-fold event
  double probability = 0.0;      // fourfold * cmp
  double factorization_fidelity = 0.0;
};

// States are taken from the identical-photon evaluation when o > 0 and from
// the distinguishable one when o == 0.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Unnormalized four-fold state (before the CMP) for the given tag of source 2.
PhotonicState fourfold_state(const PipelineConfig& cfg, int source2_tag);

struct SchmidtSplit {
  PhotonicState first;   // photons on `path`
  PhotonicState rest;    // all other photons
  std::vector<double> coefficients;  // descending, squares sum to 1
};

// Schmidt decomposition of a state with exactly one photon on `path` in every
// term, split as path | rest. The leading pair is returned as states with the
// first nonzero amplitude of `first` made real and positive.
SchmidtSplit split_photon(const PhotonicState& state, const PathId& path);

// True iff |<four_photon | a (x) bcd>|^2 >= 1 - 1e-10.
bool factorization_check(const PhotonicState& four_photon, const PhotonicState& a_state,
                         const PhotonicState& bcd_state);
bool factorization_check(const PipelineResult& result);

// ---- term classification ----------------------------------------------------

enum class SourceTerm { kEven, kOddPlus, kOddMinus };  // |0,0>, |1,-1>, |-1,1>
enum class Verdict { kSurvives, kParityBlocked, kCrossBlocked };

std::string to_string(SourceTerm t);
std::string to_string(Verdict v);
std::array<int, 2> oam_pair(SourceTerm t);

struct ComboResult {
  SourceTerm first = SourceTerm::kEven;   // emitted by source 1
  SourceTerm second = SourceTerm::kEven;  // emitted by source 2
  Verdict verdict = Verdict::kSurvives;
  bool hom_involved = false;
  bool cmp_blocked = false;
  // Unit-amplitude isolated probabilities (four-fold and CMP) for identical
  // and for source-distinguishable photons.
  double probability_identical = 0.0;
  double probability_distinguishable = 0.0;
};

struct TermClassification {
  std::vector<ComboResult> combos;  // 9 entries, row-major in (first, second)

  int count(Verdict v) const;
  const ComboResult& at(SourceTerm first, SourceTerm second) const;
};

TermClassification classify_terms(const PipelineConfig& cfg);

// ---- HOM scan ----------------------------------------------------------------

struct HomPoint {
  double overlap = 0.0;
  double probability = 0.0;
};

// Four-fold probability of the projection `projectors` (one per detector path,
// in the order A,B,C,D), replacing the CMP, for every overlap value.
std::vector<HomPoint> hom_scan(const PipelineConfig& cfg, const std::array<Projector1, 4>& projectors,
                               const std::vector<double>& overlaps);

// |-1><-1|_A (x) |1><1|_B (x) |-1><-1|_C (x) |1><1|_D.
std::array<Projector1, 4> hom_projectors();

// ---- mapping the output onto logical qutrit levels ---------------------------

struct PartyRelabel {
  PathId path;
  std::array<int, 3> oam{0, 1, 2};  // OAM value carrying logical level k
  std::array<cplx, 3> phase{1.0, 1.0, 1.0};
};

struct GhzRelabeling {
  std::array<PartyRelabel, 3> parties;

  // Maps every photon (path, oam[k], t) to (path, k, t) with phase[k]. Throws
  // UnsupportedMode for OAM values outside a party's triple.
  PhotonicState apply_to(const PhotonicState& state) const;
};

// Relabeling for the default configuration: B {2,3,-1}, C {0,1,-1},
// D {0,1,-1} with a -1 phase on D's level 2.
GhzRelabeling declared_relabeling();

// Builds the relabeling from a three-term state whose terms use distinct OAM
// values in every party. Terms are ordered by (|l_D|, -l_D); all phases are
// absorbed by the last party. Throws std::invalid_argument otherwise.
GhzRelabeling derive_relabeling(const PhotonicState& bcd, const std::array<PathId, 3>& paths);

// (w0|000> + w1|111> + w2|222>)/norm on the given paths, levels as OAM labels.
PhotonicState ghz_state(const std::array<PathId, 3>& paths, const std::array<double, 3>& weights = {1, 1, 1});

// Expected output kets (all amplitudes +1/sqrt3) on B, C, D for the default
// and the detailed-setup layouts.
PhotonicState target_state();
PhotonicState detailed_setup_target();

}  // namespace ghz3
