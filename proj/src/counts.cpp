#include "ghz3/counts.hpp"

#include <algorithm>
#include <stdexcept>

#include "ghz3/errors.hpp"

namespace ghz3 {

namespace {

void require_non_negative(std::initializer_list<double> values, const char* what) {
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": inputs must be non-negative");
  }
}

double per_pulse(double counts, const RateModel& m) { return counts / (m.tau_int * m.rep_rate); }

}  // namespace

std::string pair_key(char d1, char d2) {
  if (d1 == d2) throw std::invalid_argument("pair_key: detectors must differ");
  return d1 < d2 ? std::string{d1, d2} : std::string{d2, d1};
}

const std::array<std::string, 6>& all_pairs() {
  static const std::array<std::string, 6> pairs{"AB", "AC", "AD", "BC", "BD", "CD"};
  return pairs;
}

double fourfold_probability(double p_ab, double p_cd, double p_ac, double p_bd, double p_ad, double p_bc) {
  for (double p : {p_ab, p_cd, p_ac, p_bd, p_ad, p_bc}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("fourfold_probability: probabilities must lie in [0,1]");
  }
  return p_ab * p_cd + p_ac * p_bd + p_ad * p_bc;
}

double fourfold_probability(const PairMap& p) {
  auto get = [&](const std::string& k) {
    auto it = p.find(k);
    if (it == p.end()) throw MissingPair("fourfold_probability: missing pair " + k);
    return it->second;
  };
  return fourfold_probability(get("AB"), get("CD"), get("AC"), get("BD"), get("AD"), get("BC"));
}

double accidental_pair(double s_i, double s_j, double tau_int, double rep_rate) {
  require_non_negative({s_i, s_j}, "accidental_pair");
  if (!(tau_int > 0.0) || !(rep_rate > 0.0)) throw std::invalid_argument("accidental_pair: tau and rate must be positive");
  return s_i * s_j / (tau_int * tau_int * rep_rate);
}

double accidental_pair_per_window(double s_i, double s_j, double tau_int, double rep_rate) {
  return accidental_pair(s_i, s_j, tau_int, rep_rate) * tau_int;
}

double accidental_fourfold(const PairMap& acc, const PairMap& cc) {
  auto get = [](const PairMap& m, const std::string& k, const char* which) {
    auto it = m.find(k);
    if (it == m.end()) throw MissingPair(std::string("accidental_fourfold: missing ") + which + " pair " + k);
    return it->second;
  };
  double sum = 0.0;
  for (const auto& k : all_pairs()) {
    std::string rest;
    for (char d : std::string("ABCD")) {
      if (k.find(d) == std::string::npos) rest += d;
    }
    sum += get(acc, k, "accidental") * get(cc, rest, "coincidence");
  }
  return sum;
}

double subtract(double observed, double accidental) {
  require_non_negative({observed, accidental}, "subtract");
  return std::max(observed - accidental, 0.0);
}

double mean_photon_number(double pair_rate, double eta, double rep_rate) {
  if (!(pair_rate > 0.0) || !(eta > 0.0) || !(rep_rate > 0.0)) {
    throw std::invalid_argument("mean_photon_number: inputs must be positive");
  }
  return pair_rate / (eta * eta * rep_rate);
}

double higher_order_ratio(double mu, double eta) {
  if (!(mu >= 0.0) || !(eta > 0.0)) throw std::invalid_argument("higher_order_ratio: bad input");
  return 3.0 * mu * eta * eta;
}

void RateModel::validate() const {
  if (!(rep_rate > 0.0) || !(tau_int > 0.0)) throw std::invalid_argument("RateModel: rep_rate and tau_int must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("RateModel: eta must lie in (0,1]");
  for (char d : std::string("ABCD")) {
    auto it = singles.find(d);
    if (it == singles.end()) throw MissingPair(std::string("RateModel: missing singles for ") + d);
    if (!(it->second >= 0.0)) throw std::invalid_argument("RateModel: negative singles");
  }
  for (const auto& k : all_pairs()) {
    auto it = pairs.find(k);
    if (it == pairs.end()) throw MissingPair("RateModel: missing pair " + k);
    if (!(it->second >= 0.0)) throw std::invalid_argument("RateModel: negative pair counts");
  }
}

CountsReport analyze_rates(const RateModel& m) {
  m.validate();
  const double pulses = m.tau_int * m.rep_rate;
  PairMap p, acc_prob;
  CountsReport r;
  for (const auto& k : all_pairs()) {
    p[k] = per_pulse(m.pairs.at(k), m);
    r.acc_pairs[k] = accidental_pair_per_window(m.singles.at(k[0]), m.singles.at(k[1]), m.tau_int, m.rep_rate);
    acc_prob[k] = per_pulse(r.acc_pairs[k], m);
  }
  r.p4_predicted = fourfold_probability(p) * pulses;
  r.acc_fourfold = accidental_fourfold(acc_prob, p) * pulses;
  return r;
}

}  // namespace ghz3
