#include <doctest.h>

#include "ghz3/counts.hpp"
#include "ghz3/errors.hpp"

using namespace ghz3;

namespace {

RateModel sample_model() {
  RateModel m;
  m.rep_rate = 8e7;
  m.tau_int = 1.0;
  m.eta = 0.44;
  m.singles = {{'A', 1e5}, {'B', 2e5}, {'C', 1.5e5}, {'D', 1e5}};
  m.pairs = {{"AB", 13000}, {"CD", 12000}, {"AC", 50}, {"BD", 60}, {"AD", 40}, {"BC", 70}};
  return m;
}

}  // namespace

TEST_CASE("pair keys") {
  CHECK(pair_key('B', 'A') == "AB");
  CHECK(pair_key('C', 'D') == "CD");
  CHECK_THROWS_AS(pair_key('A', 'A'), std::invalid_argument);
  CHECK(all_pairs().size() == 6);
}

TEST_CASE("four-fold probability") {
  const double q = 0.01;
  CHECK(fourfold_probability(q, q, q, q, q, q) == doctest::Approx(3 * q * q));
  CHECK(fourfold_probability(0.2, 0.3, 0, 0, 0, 0) == doctest::Approx(0.06));
  CHECK(fourfold_probability(1e-3, 1e-3, 0, 0, 0, 0) == doctest::Approx(1e-6));
  CHECK_THROWS_AS(fourfold_probability(1.5, 0, 0, 0, 0, 0), std::invalid_argument);
  PairMap partial{{"AB", 0.1}, {"CD", 0.1}};
  CHECK_THROWS_AS(fourfold_probability(partial), MissingPair);
}

TEST_CASE("accidental pairs") {
  CHECK(accidental_pair(1000, 2000, 1.0, 8e7) == doctest::Approx(2.5e-2));
  CHECK(accidental_pair(0, 2000, 1.0, 8e7) == 0.0);
  CHECK(accidental_pair(1000, 2000, 1.0, 8e7) == accidental_pair(2000, 1000, 1.0, 8e7));
  // Per-window counts: with S in counts per 10 s the rate is per second, the
  // window holds ten times as many.
  CHECK(accidental_pair_per_window(1000, 2000, 10.0, 8e7) == doctest::Approx(10.0 * accidental_pair(1000, 2000, 10.0, 8e7)));
  CHECK_THROWS_AS(accidental_pair(-1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(accidental_pair(1, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("dimensional consistency of the per-window accidentals") {
  // Doubling the window doubles the singles per window; the accidental
  // count per window must double as well (constant rate, twice the time).
  const double s1 = 1e5, s2 = 2e5, r = 8e7;
  const double one = accidental_pair_per_window(s1, s2, 1.0, r);
  const double two = accidental_pair_per_window(2 * s1, 2 * s2, 2.0, r);
  CHECK(two == doctest::Approx(2.0 * one));
}

TEST_CASE("accidental four-folds") {
  PairMap acc, cc;
  for (const auto& k : all_pairs()) {
    acc[k] = 0.0;
    cc[k] = 0.0;
  }
  acc["AB"] = 2.0;
  cc["CD"] = 3.0;
  CHECK(accidental_fourfold(acc, cc) == doctest::Approx(6.0));
  cc.erase("AB");
  CHECK_THROWS_AS(accidental_fourfold(acc, cc), MissingPair);
}

TEST_CASE("subtraction") {
  CHECK(subtract(5.0, 2.0) == 3.0);
  CHECK(subtract(2.0, 5.0) == 0.0);
  CHECK(subtract(4.0, 0.0) == 4.0);
}

TEST_CASE("mean photon number and multi-pair ratio") {
  const double mu = mean_photon_number(13000, 0.44, 8e7);
  CHECK(std::abs(mu / 8.4e-4 - 1.0) < 0.01);
  const double ratio = higher_order_ratio(mu, 0.44);
  CHECK(std::abs(ratio / 4.8e-4 - 1.0) < 0.02);
  CHECK(ratio == doctest::Approx(3.0 * 13000 / 8e7));
  CHECK_THROWS_AS(mean_photon_number(13000, 0.0, 8e7), std::invalid_argument);
}

TEST_CASE("rate analysis") {
  const RateModel m = sample_model();
  const CountsReport r = analyze_rates(m);
  const double n = m.rep_rate * m.tau_int;
  const double expected = (13000.0 / n) * (12000.0 / n) + (50.0 / n) * (60.0 / n) + (40.0 / n) * (70.0 / n);
  CHECK(r.p4_predicted == doctest::Approx(expected * n));
  CHECK(r.acc_pairs.at("AB") == doctest::Approx(1e5 * 2e5 / 8e7));
  double acc = 0.0;
  for (const auto& k : all_pairs()) {
    std::string rest;
    for (char d : std::string("ABCD")) {
      if (k.find(d) == std::string::npos) rest += d;
    }
    acc += (r.acc_pairs.at(k) / n) * (m.pairs.at(rest) / n);
  }
  CHECK(r.acc_fourfold == doctest::Approx(acc * n));

  RateModel bad = m;
  bad.singles.erase('D');
  CHECK_THROWS_AS(analyze_rates(bad), MissingPair);
  bad = m;
  bad.eta = 1.5;
  CHECK_THROWS_AS(analyze_rates(bad), std::invalid_argument);
}
