#include <doctest.h>

#include <cmath>

#include "ghz3/elements.hpp"
#include "ghz3/errors.hpp"
#include "ghz3/photonic.hpp"

using namespace ghz3;

namespace {

ModeLabel m(const char* path, int oam, int tag = 0) { return {PathId(path), oam, tag}; }

PhotonicState single(const char* path, int oam, int tag = 0) { return PhotonicState{{1.0, {m(path, oam, tag)}}}; }

}  // namespace

TEST_CASE("terms are canonicalized and merged") {
  PhotonicState s{{1.0, {m("B", 1), m("A", 0)}}, {2.0, {m("A", 0), m("B", 1)}}};
  REQUIRE(s.size() == 1);
  CHECK(s.terms().begin()->second == cplx(3.0));
  CHECK(s.terms().begin()->first.front() == m("A", 0));
  CHECK(s.photon_number() == 2);
}

TEST_CASE("mixed photon numbers are rejected") {
  CHECK_THROWS_AS((PhotonicState{{1.0, {m("A", 0)}}, {1.0, {m("A", 0), m("B", 0)}}}), std::invalid_argument);
}

TEST_CASE("identity map leaves a state unchanged") {
  const auto s = single("A", 0);
  CHECK(apply(LinearMap::identity({m("A", 0)}), s) == s);
}

TEST_CASE("reflection with charge 2 sends 0 to 2") {
  const auto out = apply(spp_reflect("A"), single("A", 0));
  CHECK(out == single("A", 2));
}

TEST_CASE("modes outside the support throw") {
  CHECK_THROWS_AS(apply(LinearMap::identity({m("A", 0)}), single("A", 1)), UnsupportedMode);
}

TEST_CASE("two identical photons on a splitter never leave through different ports") {
  const PhotonicState in{{1.0, {m("A", 1), m("B", 1)}}};
  const auto out = apply(beam_splitter("A", "B"), in);
  CHECK(std::abs(amplitude(out, make_occupation({m("A", 1), m("B", 1)})) ) < 1e-15);
  CHECK(out.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Both photons bunch into one output: amplitude sqrt2 * i/2 in the normalized basis.
  CHECK(std::abs(amplitude(out, make_occupation({m("A", 1), m("A", 1)}))) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("distinguishable photons on a splitter coincide half of the time") {
  const PhotonicState in{{1.0, {m("A", 1, 0), m("B", 1, 1)}}};
  const auto out = apply(beam_splitter("A", "B"), in);
  const auto ps = postselect(out, {PathId("A"), PathId("B")});
  CHECK(ps.probability == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tensor multiplies amplitudes and counts terms") {
  PhotonicState s1{{2.0, {m("A", 0)}}};
  PhotonicState s2{{3.0, {m("B", 1)}}};
  const auto t = tensor(s1, s2);
  REQUIRE(t.size() == 1);
  CHECK(t.terms().begin()->second == cplx(6.0));

  PhotonicState c1{{1.0, {m("A", 0), m("B", 0)}}, {1.0, {m("A", 1), m("B", -1)}}, {1.0, {m("A", -1), m("B", 1)}}};
  PhotonicState c2{{1.0, {m("C", 0), m("D", 0)}}, {1.0, {m("C", 1), m("D", -1)}}, {1.0, {m("C", -1), m("D", 1)}}};
  CHECK(tensor(c1, c2).size() == 9);
  CHECK(tensor(c1, PhotonicState::vacuum()) == c1);
}

TEST_CASE("tensor rejects shared paths") {
  CHECK_THROWS_AS(tensor(single("A", 0), single("A", 1)), PathCollision);
}

TEST_CASE("postselection keeps one photon per detector path") {
  PhotonicState s{{1.0, {m("A", 0), m("A", 1)}}};
  const auto ps = postselect(s, {PathId("A"), PathId("B")});
  CHECK(ps.probability == 0.0);
  CHECK(ps.state.empty());

  PhotonicState mixed{{1.0, {m("A", 0), m("B", 0)}}, {1.0, {m("A", 0), m("A", 1)}}};
  const auto kept = postselect(mixed, {PathId("A"), PathId("B")});
  CHECK(kept.probability == doctest::Approx(0.5));
  CHECK(kept.state.size() == 1);
}

TEST_CASE("amplitude conventions") {
  PhotonicState s{{1.0, {m("A", 0), m("A", 0)}}};
  CHECK(std::abs(amplitude(s, make_occupation({m("A", 0), m("A", 0)})) - std::sqrt(2.0)) < 1e-15);
  CHECK(amplitude(s, make_occupation({m("A", 0), m("A", 0)}), Convention::kMonomial) == cplx(1.0));
  CHECK(amplitude(s, make_occupation({m("A", 1), m("A", 0)})) == cplx(0.0));
  CHECK(s.squared_norm() == doctest::Approx(2.0));
}

TEST_CASE("pure-state fidelity") {
  const auto a = single("A", 0);
  CHECK(fidelity_pure(a, a) == doctest::Approx(1.0));
  CHECK(fidelity_pure(a, single("A", 1)) == 0.0);

  const double r = 1.0 / std::sqrt(3.0);
  PhotonicState ghz{{r, {m("B", 0), m("C", 0), m("D", 0)}},
                    {r, {m("B", 1), m("C", 1), m("D", 1)}},
                    {r, {m("B", 2), m("C", 2), m("D", 2)}}};
  PhotonicState zero{{1.0, {m("B", 0), m("C", 0), m("D", 0)}}};
  CHECK(fidelity_pure(zero, ghz) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity_pure(zero.scaled(2.0), ghz), NotNormalized);
}

TEST_CASE("compose applies the inner map first") {
  const auto outer = mirror("A");
  const auto inner = spp_reflect("A");
  const auto s = single("A", -1);
  // spp: -1 -> 3, mirror: 3 -> -3.
  CHECK(apply(compose(outer, inner), s) == single("A", -3));
}

TEST_CASE("tiny amplitudes are pruned") {
  PhotonicState s{{1.0, {m("A", 0)}}, {1e-16, {m("A", 1)}}};
  CHECK(s.size() == 1);
}
