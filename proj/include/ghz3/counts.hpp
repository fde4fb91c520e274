#pragma once

// Coincidence arithmetic for two pair sources and four detectors A, B, C, D.

#include <array>
#include <map>
#include <string>

namespace ghz3 {

// Detector pair key such as "AB"; order-insensitive on input, stored sorted.
std::string pair_key(char d1, char d2);

// The six pairs AB, AC, AD, BC, BD, CD.
const std::array<std::string, 6>& all_pairs();

using PairMap = std::map<std::string, double>;

// p_AB p_CD + p_AC p_BD + p_AD p_BC. Inputs must lie in [0,1].
double fourfold_probability(double p_ab, double p_cd, double p_ac, double p_bd, double p_ad, double p_bc);
double fourfold_probability(const PairMap& p);

// S_i S_j / (tau^2 R): accidental coincidences per second for singles S given
// as counts per integration window tau.
double accidental_pair(double s_i, double s_j, double tau_int, double rep_rate);

// The same accidental rate expressed as counts per integration window.
double accidental_pair_per_window(double s_i, double s_j, double tau_int, double rep_rate);

// Sum over the six pairs of acc_ij * CC_kl with kl the complementary pair.
// Throws MissingPair when a pair is absent from either map.
double accidental_fourfold(const PairMap& acc, const PairMap& cc);

// max(observed - accidental, 0).
double subtract(double observed, double accidental);

// pair_rate / (eta^2 rep_rate).
double mean_photon_number(double pair_rate, double eta, double rep_rate);

// Ratio of double-pair to single-pair four-fold contributions, 3 mu eta^2.
double higher_order_ratio(double mu, double eta);

struct RateModel {
  double rep_rate = 8e7;   // Hz
  double tau_int = 1.0;    // s
  double eta = 0.44;
  std::map<char, double> singles;  // counts per tau_int
  PairMap pairs;                   // coincidence counts per tau_int

  // Throws std::invalid_argument on negative values, eta outside (0,1], or
  // missing detectors/pairs.
  void validate() const;
};

struct CountsReport {
  double p4_predicted = 0.0;   // four-fold counts per window
  PairMap acc_pairs;           // accidental pair counts per window
  double acc_fourfold = 0.0;   // accidental four-fold counts per window
};

// Pair probabilities per pulse are counts / (tau R); results are converted
// back to counts per window.
CountsReport analyze_rates(const RateModel& model);

}  // namespace ghz3
