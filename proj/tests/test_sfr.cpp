#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "stabreg/errors.hpp"
#include "stabreg/rng.hpp"
#include "stabreg/sfr.hpp"

using namespace stabreg;

TEST_SUITE("sfr") {

TEST_CASE("validation") {
  SfrModel m = fx::crossing_sfr();
  CHECK_NOTHROW(validate_sfr(m));

  SUBCASE("empty support") {
    m.per_movement[0].support.clear();
    m.per_movement[0].prob.clear();
    CHECK_THROWS_AS(validate_sfr(m), ConfigError);
  }
  SUBCASE("length mismatch") {
    m.per_movement[1].prob.push_back(0.0);
    CHECK_THROWS_AS(validate_sfr(m), ConfigError);
  }
  SUBCASE("unsorted support") {
    m.per_movement[0].support = {2.0, 1.0};
    CHECK_THROWS_AS(validate_sfr(m), ConfigError);
  }
  SUBCASE("unnormalized probabilities") {
    m.per_movement[0].prob = {0.3, 0.6};
    CHECK_THROWS_AS(validate_sfr(m), ConfigError);
  }
  SUBCASE("negative rate") {
    m.per_movement[0].support = {-1.0, 2.0};
    CHECK_THROWS_AS(validate_sfr(m), ConfigError);
  }
}

TEST_CASE("mean rates") {
  auto mean = mean_sfr(fx::crossing_sfr());
  CHECK(mean[0] == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(mean[1] == doctest::Approx(1.5).epsilon(1e-15));
  auto mean8 = mean_sfr(fx::two_intersections_sfr());
  for (double v : mean8) CHECK(v == doctest::Approx(3.5));
}

TEST_CASE("joint enumeration order and probabilities") {
  auto jv = enumerate_joint_values(fx::crossing_sfr());
  REQUIRE(jv.size() == 4);
  // first movement cycles fastest
  CHECK(jv[0].s == std::vector<double>{1.0, 1.0});
  CHECK(jv[1].s == std::vector<double>{2.0, 1.0});
  CHECK(jv[2].s == std::vector<double>{1.0, 2.0});
  CHECK(jv[3].s == std::vector<double>{2.0, 2.0});
  CHECK(jv[0].prob == doctest::Approx(0.15));
  CHECK(jv[1].prob == doctest::Approx(0.35));
  CHECK(jv[2].prob == doctest::Approx(0.15));
  CHECK(jv[3].prob == doctest::Approx(0.35));
  double total = 0;
  for (const auto& v : jv) total += v.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("masked enumeration holds the rest at the mean") {
  std::vector<int> mask{1};
  auto jv = enumerate_joint_values(fx::crossing_sfr(), &mask);
  REQUIRE(jv.size() == 2);
  CHECK(jv[0].s == std::vector<double>{1.7, 1.0});
  CHECK(jv[1].s == std::vector<double>{1.7, 2.0});
  CHECK(jv[0].prob == doctest::Approx(0.5));
}

TEST_CASE("enumeration cap") {
  auto model = fx::two_intersections_sfr();
  CHECK(enumerate_joint_values(model).size() == 256);
  CHECK_THROWS_AS(enumerate_joint_values(model, nullptr, 100), ConfigError);
}

TEST_CASE("restricting a global index to a node") {
  auto model = fx::two_intersections_sfr();
  std::vector<int> node2{4, 5, 6, 7};
  for (std::size_t e : {0u, 17u, 255u, 96u}) {
    CHECK(restrict_joint_index(model, node2, e) == ((e >> 4) & 15u));
  }
  std::vector<int> node1{0, 1, 2, 3};
  CHECK(restrict_joint_index(model, node1, 0xB5) == 5u);
  CHECK_THROWS_AS(restrict_joint_index(model, {9}, 0), ConfigError);

  auto small = fx::crossing_sfr();
  std::vector<int> second{1};
  for (std::size_t e = 0; e < 4; ++e) {
    CHECK(restrict_joint_index(small, {0, 1}, e) == e);
    CHECK(restrict_joint_index(small, second, e) == e / 2);
  }
}

TEST_CASE("sampling matches the distribution") {
  auto model = fx::crossing_sfr();
  Rng rng(make_stream(11, RngStream::Supply));
  int high0 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto s = sample_joint(model, rng);
    CHECK((s[0] == 1.0 || s[0] == 2.0));
    CHECK((s[1] == 1.0 || s[1] == 2.0));
    if (s[0] == 2.0) ++high0;
  }
  // three sigma around p = 0.7
  double frac = static_cast<double>(high0) / n;
  CHECK(std::fabs(frac - 0.7) < 3.0 * std::sqrt(0.7 * 0.3 / n));
}

TEST_CASE("prediction at the theta extremes") {
  auto model = fx::crossing_sfr();
  Rng rng(make_stream(3, RngStream::Predict));
  std::vector<double> truth{2.0, 1.0};

  Predictor full{1.0, GuessStrategy::MeanPoint, 1.0};
  auto out = predict(full, model, truth, rng);
  CHECK(out.s_hat == truth);
  CHECK(out.hit == std::vector<std::uint8_t>{1, 1});

  Predictor blind{0.0, GuessStrategy::MeanPoint, 1.0};
  out = predict(blind, model, truth, rng);
  CHECK(out.s_hat == std::vector<double>{1.7, 1.5});
  CHECK(out.hit == std::vector<std::uint8_t>{0, 0});

  Predictor empirical{0.0, GuessStrategy::Empirical, 1.0};
  out = predict(empirical, model, truth, rng);
  for (double v : out.s_hat) CHECK((v == 1.0 || v == 2.0));
}

TEST_CASE("correctness window is half open") {
  CHECK(prediction_correct(3.0, 3.4, 1.0));
  CHECK(prediction_correct(3.5, 4.0, 1.0));
  CHECK(!prediction_correct(3.5, 3.0, 1.0));  // upper edge excluded
  CHECK(prediction_correct(2.0, 2.0, 0.0));
  CHECK(!prediction_correct(2.0, 2.0000001, 0.0));
}

TEST_CASE("analytic accuracy") {
  auto model = fx::crossing_sfr();
  SUBCASE("mean point guess") {
    for (double theta : {0.0, 0.25, 0.5, 1.0}) {
      Predictor p{theta, GuessStrategy::MeanPoint, 1.0};
      auto acc = accuracy_per_movement(p, model);
      // mean 1.7 only lands inside the window around s = 2
      CHECK(acc[0] == doctest::Approx(theta + 0.7 * (1 - theta)).epsilon(1e-12));
      CHECK(acc[1] == doctest::Approx(theta + 0.5 * (1 - theta)).epsilon(1e-12));
    }
  }
  SUBCASE("empirical guess with exact matching") {
    Predictor p{0.0, GuessStrategy::Empirical, 0.0};
    auto acc = accuracy_per_movement(p, model);
    CHECK(acc[0] == doctest::Approx(0.3 * 0.3 + 0.7 * 0.7).epsilon(1e-12));
    CHECK(acc[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(accuracy_from_ability(p, model) == doctest::Approx((0.58 + 0.5) / 2));
  }
  SUBCASE("band wider than the support gap") {
    Predictor p{0.5, GuessStrategy::MeanPoint, 1.5};
    CHECK_THROWS_AS(accuracy_per_movement(p, model), ConfigError);
  }
  SUBCASE("theta out of range") {
    Predictor p{1.5, GuessStrategy::MeanPoint, 1.0};
    CHECK_THROWS_AS(accuracy_per_movement(p, model), ConfigError);
  }
}

TEST_CASE("empirical prediction hit rate approaches the analytic value") {
  auto model = fx::two_intersections_sfr();
  Predictor p{0.5, GuessStrategy::MeanPoint, 1.0};
  auto analytic = accuracy_from_ability(p, model);
  CHECK(analytic == doctest::Approx(0.75));  // theta + 0.5 (1 - theta)

  Rng supply(make_stream(5, RngStream::Supply));
  Rng predict_rng(make_stream(5, RngStream::Predict));
  const int n = 20000;
  long hits = 0, cells = 0;
  for (int i = 0; i < n; ++i) {
    auto truth = sample_joint(model, supply);
    auto out = predict(p, model, truth, predict_rng);
    for (std::size_t m = 0; m < truth.size(); ++m) {
      hits += prediction_correct(out.s_hat[m], truth[m], p.band) ? 1 : 0;
      ++cells;
    }
  }
  double rate = static_cast<double>(hits) / static_cast<double>(cells);
  CHECK(std::fabs(rate - analytic) < 0.01);
}

}  // TEST_SUITE
