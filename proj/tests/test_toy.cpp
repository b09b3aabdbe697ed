#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "todi/error.hpp"
#include "todi/gradients.hpp"
#include "todi/toy.hpp"

using namespace todi;
using namespace todi::toy;

TEST_CASE("every family hosts both regions") {
  for (Family f : all_families()) {
    for (std::uint64_t seed : {1, 2, 3, 4, 5, 7}) {
      INFO(to_string(f), " seed ", seed);
      const auto s = make_toy(f, 50, seed);
      std::size_t pgq = 0, qgp = 0;
      for (Region r : s.regions) {
        pgq += r == Region::PGreaterQ;
        qgp += r == Region::QGreaterP;
      }
      CHECK(pgq >= 1);
      CHECK(qgp >= 1);
      CHECK(s.p.size() == 50);
    }
  }
  CHECK_THROWS_AS(make_toy(Family::BimodalVsUnimodal, 3, 1), InvalidParameter);
}

TEST_CASE("toy scenarios are bit-reproducible") {
  for (Family f : all_families()) {
    const auto a = make_toy(f, 40, 11), b = make_toy(f, 40, 11), c = make_toy(f, 40, 12);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK_FALSE((a.p == c.p && a.q == c.q));
  }
}

TEST_CASE("gradient profile follows the complementary-signal theorem") {
  for (Family f : all_families()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto prof = gradient_profile(make_toy(f, 50, seed));
      CHECK(dominance_violations(prof) == 0);
      for (const auto& row : prof) {
        // Brute force against the q-gradients themselves.
        CHECK(std::abs(row.grad_fkl_abs - std::abs(grad_fkl_q(row.p, row.q))) <= 1e-9 * row.grad_fkl_abs);
        CHECK(std::abs(row.grad_rkl_abs - std::abs(grad_rkl_q(row.p, row.q))) <= 1e-9 * (1.0 + row.grad_rkl_abs));
        if (row.region == Region::PGreaterQ) CHECK(row.dominant == Dominant::FKL);
        if (row.region == Region::QGreaterP) CHECK(row.dominant == Dominant::RKL);
      }
    }
  }
}

TEST_CASE("equal rows are ties and all-equal scenarios are rejected") {
  const auto p = VocabDist::from_probs(std::vector<double>{0.5, 0.3, 0.2});
  const auto q = VocabDist::from_probs(std::vector<double>{0.4, 0.3, 0.3});
  const auto prof = gradient_profile(make_scenario(p, q));
  CHECK(prof[1].region == Region::Equal);
  CHECK(prof[1].dominant == Dominant::Tie);
  CHECK(prof[1].grad_fkl_abs == doctest::Approx(1.0));
  CHECK(prof[1].grad_rkl_abs == doctest::Approx(1.0));
  CHECK_THROWS_AS(gradient_profile(make_scenario(p, p)), DegenerateStatistic);
}

TEST_CASE("profile csv round trip") {
  const auto prof = gradient_profile(make_toy(Family::RandomDirichlet, 30, 9));
  std::ostringstream out;
  write_profile_csv(out, prof);
  CHECK(out.str().rfind("index,p,q,region,grad_fkl_abs,grad_rkl_abs,dominant\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_profile_csv(in) == prof);
}

TEST_CASE("enum names round trip") {
  for (Family f : all_families()) CHECK(family_from_string(to_string(f)) == f);
  for (Region r : {Region::PGreaterQ, Region::QGreaterP, Region::Equal}) CHECK(region_from_string(to_string(r)) == r);
  for (Dominant d : {Dominant::FKL, Dominant::RKL, Dominant::Tie}) CHECK(dominant_from_string(to_string(d)) == d);
  CHECK(to_string(Region::PGreaterQ) == "P_GT_Q");
  CHECK_THROWS(family_from_string("nope"));
}
