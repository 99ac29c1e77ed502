#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "npspect/geometry.hpp"
#include "npspect/material.hpp"

using namespace npspect;

TEST_CASE("convexity validation") {
  CHECK(validate_convexity({1, 1}, 3).ok);
  auto v = validate_convexity({-1, 1}, 3);
  CHECK_FALSE(v.ok);
  CHECK(v.reason == "d*lambda+2*mu>0 failed");
  auto w = validate_convexity({0, 0}, 2);
  CHECK_FALSE(w.ok);
  CHECK(w.reason == "mu>0 failed");
  CHECK_THROWS_AS(validate_convexity({1, 1}, 4), Error);
}

TEST_CASE("kappa0 values and range") {
  CHECK(kappa0({1, 1}) == Catch::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(kappa0({0, 1}) == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(kappa0({1, 2}) == Catch::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(kappa0({0, 0}), Error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu(0.05, 8.0);
  for (int t = 0; t < 200; ++t) {
    double m = mu(rng);
    std::uniform_real_distribution<double> lam(-2 * m / 3 + 1e-6, 10.0);
    LameParams p{lam(rng), m};
    REQUIRE(validate_convexity(p, 3).ok);
    double k = kappa0(p);
    CHECK(k > 0);
    CHECK(k < 0.5);
  }
}

TEST_CASE("kappa0 strictly increasing in mu at fixed lambda > 0") {
  // d kappa0 / d mu = 2 lambda / (2 lambda + 4 mu)^2, so the monotonicity
  // holds exactly when lambda > 0 (constant at lambda = 0)
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.01, 4.0), mu(0.2, 5.0), dd(0.01, 1.0);
  for (int t = 0; t < 100; ++t) {
    double l = lam(rng), m = mu(rng), d = dd(rng);
    CHECK(kappa0({l, m + d}) > kappa0({l, m}));
  }
  CHECK(kappa0({0, 1}) == kappa0({0, 2.5}));
}

TEST_CASE("kelvin constants") {
  auto k = kelvin_constants({1, 1});
  CHECK(k.lambda_prime == Catch::Approx(1.0 / (6 * kPi)).epsilon(1e-14));
  CHECK(k.mu_prime == Catch::Approx(1.0 / (3 * kPi)).epsilon(1e-14));
  CHECK(k.delta_prime == Catch::Approx(1.0 / (6 * kPi)).epsilon(1e-14));
  CHECK(kelvin_constants({0, 1}).delta_prime == Catch::Approx(1.0 / (4 * kPi)).epsilon(1e-14));

  // pi mu |lambda'-mu'| = kappa0, exactly up to rounding
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(-0.3, 5.0), mu(0.1, 5.0);
  for (int t = 0; t < 100; ++t) {
    LameParams p{lam(rng), mu(rng)};
    auto kc = kelvin_constants(p);
    CHECK(kPi * p.mu * kc.delta_prime == Catch::Approx(kappa0(p)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(kelvin_constants({-1, 1}), Error);
}

TEST_CASE("essential spectrum prediction: constant field") {
  auto field = LameField::constant({1, 1});
  auto samples = sample_components({make_sphere(1.0)}, 16, 32);
  auto pred = predict_essential_spectrum(field, samples);
  REQUIRE(pred.points.size() == 3);
  CHECK(pred.intervals.empty());
  CHECK(pred.points[0] == Catch::Approx(-1.0 / 6));
  CHECK(pred.points[1] == 0.0);
  CHECK(pred.points[2] == Catch::Approx(1.0 / 6));
}

TEST_CASE("essential spectrum prediction: per-component field") {
  auto s1 = make_sphere(1.0);
  auto s2 = make_sphere(1.0, Vec3(5, 0, 0));
  s2.component_id = 1;
  auto field = LameField::per_component({{1, 1}, {1, 2}},
                                        [](const Vec3& x) { return x.x() < 2.5 ? 0 : 1; });
  auto pred = predict_essential_spectrum(field, sample_components({s1, s2}, 12, 24));
  REQUIRE(pred.points.size() == 5);
  CHECK(pred.points[0] == Catch::Approx(-0.2));
  CHECK(pred.points[1] == Catch::Approx(-1.0 / 6));
  CHECK(pred.points[2] == 0.0);
  CHECK(pred.points[3] == Catch::Approx(1.0 / 6));
  CHECK(pred.points[4] == Catch::Approx(0.2));
}

TEST_CASE("essential spectrum prediction: variable field interval") {
  auto field = LameField::z_linear(1.0, 1.5, 0.5);  // mu in [1,2] on the unit sphere
  auto pred = predict_essential_spectrum(field, sample_components({make_sphere(1.0)}, 48, 96));
  REQUIRE(pred.points.size() == 1);  // just 0
  CHECK(pred.points[0] == 0.0);
  REQUIRE(pred.intervals.size() == 2);
  CHECK(pred.intervals[0].lo == Catch::Approx(-0.2).margin(1e-3));
  CHECK(pred.intervals[0].hi == Catch::Approx(-1.0 / 6).margin(1e-3));
  CHECK(pred.intervals[1].lo == Catch::Approx(1.0 / 6).margin(1e-3));
  CHECK(pred.intervals[1].hi == Catch::Approx(0.2).margin(1e-3));

  // negation symmetry apart from 0
  for (double p : pred.points)
    if (p != 0) CHECK(pred.distance(-p) < 1e-12);
  for (const auto& iv : pred.intervals) {
    CHECK(pred.distance(-iv.lo) < 1e-12);
    CHECK(pred.distance(-iv.hi) < 1e-12);
  }
}

TEST_CASE("prediction rejects empty samples") {
  auto field = LameField::constant({1, 1});
  CHECK_THROWS_AS(predict_essential_spectrum(field, {}), Error);
  CHECK_THROWS_AS(predict_essential_spectrum(field, {{}}), Error);
}

TEST_CASE("field validation flags inconsistent classification") {
  // claims Constant but varies
  auto bad = LameField::plugin(
      [](const Vec3& x) { return LameParams{1.0, 1.5 + 0.5 * x.z()}; }, FieldKind::Constant, 1,
      "bad");
  auto samples = sample_components({make_sphere(1.0)}, 8, 16);
  auto v = validate_field(bad, samples);
  CHECK_FALSE(v.ok);

  auto good = LameField::z_linear(1.0, 1.5, 0.5);
  auto w = validate_field(good, samples);
  CHECK(w.ok);
  CHECK(w.delta > 0);
}
