#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "stabreg/stats.hpp"

TEST_SUITE("stats") {

TEST_CASE("mean and sample sd") {
  std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  CHECK(stabreg::mean(v) == doctest::Approx(5.0));
  CHECK(stabreg::sample_sd(v) == doctest::Approx(2.138089935299395));
  CHECK(stabreg::mean({}) == doctest::Approx(0.0));
}

TEST_CASE("quantile interpolates between order statistics") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(stabreg::quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(stabreg::quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(stabreg::quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(stabreg::quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(stabreg::median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
}

TEST_CASE("box summary of one to five") {
  auto b = stabreg::box_summary({1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(b.min == doctest::Approx(1.0));
  CHECK(b.q1 == doctest::Approx(2.0));
  CHECK(b.median == doctest::Approx(3.0));
  CHECK(b.q3 == doctest::Approx(4.0));
  CHECK(b.max == doctest::Approx(5.0));
}

TEST_CASE("ols slope of an exact line") {
  std::vector<double> y;
  for (int t = 0; t < 40; ++t) y.push_back(3.0 + 2.0 * t);
  CHECK(stabreg::ols_slope(y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stabreg::ols_slope({7.0}) == doctest::Approx(0.0));
}

TEST_CASE("one sided sign test tail") {
  // 8 of 10 wins: (C(10,8)+C(10,9)+C(10,10)) / 2^10 = 56/1024.
  CHECK(stabreg::sign_test_p(8, 10) == doctest::Approx(0.0546875).epsilon(1e-12));
  CHECK(stabreg::sign_test_p(30, 30) == doctest::Approx(std::pow(0.5, 30)).epsilon(1e-9));
  CHECK(stabreg::sign_test_p(0, 10) == doctest::Approx(1.0));
}

TEST_CASE("fnv1a hash matches reference constants") {
  CHECK(stabreg::fnv1a64("") == 14695981039346656037ULL);
  CHECK(stabreg::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

}  // TEST_SUITE
