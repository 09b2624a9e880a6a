#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "phk/rng.hpp"
#include "phk/simplex.hpp"

using namespace phk;
using phk::testutil::pv;

TEST_CASE("make_prob_vector accepts explicit simplex points") {
  const ProbVector v = pv({0.25, 0.25, 0.25, 0.25, 0.0});
  REQUIRE(v.k() == 5);
  CHECK(v[0] == Catch::Approx(0.25));
  CHECK(v[4] == 0.0);
  CHECK(std::abs(v.sum() - 1.0) <= 1e-15);
}

TEST_CASE("make_prob_vector uniform sixths") {
  const ProbVector v = pv({1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6});
  REQUIRE(v.k() == 6);
  for (int i = 0; i < 6; ++i) CHECK(v[i] == Catch::Approx(1.0 / 6).margin(1e-15));
}

TEST_CASE("make_prob_vector rejects bad input") {
  CHECK_THROWS_AS(pv({0.5, 0.6}), std::invalid_argument);  // sum 1.1
  CHECK_THROWS_AS(make_prob_vector(std::vector<double>{0.5, 0.5}, 3), std::invalid_argument);
  CHECK_THROWS_AS(pv({0.5, 0.6, -0.1}), std::invalid_argument);  // entry below -1e-12
}

TEST_CASE("make_prob_vector clamps tiny negatives and renormalizes") {
  const ProbVector v = make_prob_vector(std::vector<double>{0.5 + 4e-10, 0.5, -1e-13}, 3);
  CHECK(v[2] == 0.0);
  CHECK(std::abs(v.sum() - 1.0) <= 1e-15);
}

TEST_CASE("uniform distribution") {
  const ProbVector u5 = uniform(5);
  for (int i = 0; i < 5; ++i) CHECK(u5[i] == Catch::Approx(0.2).margin(1e-16));
  const ProbVector u2 = uniform(2);
  CHECK(u2[0] == Catch::Approx(0.5));
  CHECK_THROWS_AS(uniform(1), std::invalid_argument);
}

TEST_CASE("sample_simplex is deterministic for a fixed seed") {
  Rng r1(42), r2(42);
  const ProbVector a = sample_simplex(5, r1);
  const ProbVector b = sample_simplex(5, r2);
  CHECK(a == b);  // bit-for-bit
  CHECK_THROWS_AS(sample_simplex(1, r1), std::invalid_argument);
}

TEST_CASE("sample_simplex draws satisfy the simplex invariants") {
  Rng rng(42);
  for (int rep = 0; rep < 1000; ++rep) {
    const ProbVector v = sample_simplex(5, rng);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      CHECK(v[i] >= 0.0);
      sum += v[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("sample_simplex empirical mean approaches the uniform point") {
  Rng rng(7);
  const int n = 100000;
  std::vector<double> mean(5, 0.0);
  for (int rep = 0; rep < n; ++rep) {
    const ProbVector v = sample_simplex(5, rng);
    for (int i = 0; i < 5; ++i) mean[static_cast<std::size_t>(i)] += v[i];
  }
  for (double& m : mean) m /= n;
  for (double m : mean) CHECK(std::abs(m - 0.2) <= 5e-3);
}

TEST_CASE("substreams are independent of draw order") {
  Rng base(99);
  Rng s3 = base.substream(3);
  const ProbVector a = sample_simplex(5, s3);
  base.next_u64();  // consuming the base stream must not disturb substreams
  Rng s3b = Rng(99).substream(3);
  const ProbVector b = sample_simplex(5, s3b);
  CHECK(a == b);
}
