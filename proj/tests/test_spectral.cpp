#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "npspect/spectral.hpp"

using namespace npspect;

namespace {

SpectrumResult synthetic(std::vector<double> eigs, const std::string& grid = "synthetic") {
  SpectrumResult s;
  std::sort(eigs.begin(), eigs.end());
  s.eigenvalues = std::move(eigs);
  s.grid_desc = grid;
  return s;
}

/// Ladder of spectra drawn near the targets, tightening with the level.
std::vector<SpectrumResult> clustered_ladder(const std::vector<double>& targets,
                                             std::uint64_t seed = 5) {
  std::mt19937_64 rng(seed);
  std::vector<SpectrumResult> ladder;
  for (int level = 0; level < 3; ++level) {
    std::size_t n = 200u << level;
    double spread = 0.015 / (1 << level);
    std::normal_distribution<double> noise(0.0, spread);
    std::vector<double> eigs;
    for (std::size_t i = 0; i < n; ++i)
      eigs.push_back(targets[i % targets.size()] + noise(rng));
    ladder.push_back(synthetic(std::move(eigs), "level" + std::to_string(level)));
  }
  return ladder;
}

}  // namespace

TEST_CASE("eigenvalues of a scaled identity") {
  OperatorMatrix om;
  om.kind = MatrixKind::SymmetrizedNP;
  om.n_nodes = 4;
  om.m = 2.5 * Eigen::MatrixXd::Identity(12, 12);
  auto s = eigenvalues(om);
  REQUIRE(s.eigenvalues.size() == 12);
  for (double v : s.eigenvalues) CHECK(v == Catch::Approx(2.5).epsilon(1e-14));

  om.kind = MatrixKind::NP;  // complex path
  auto c = eigenvalues(om);
  for (double v : c.eigenvalues) CHECK(v == Catch::Approx(2.5).epsilon(1e-12));
  CHECK(c.max_imag_abs < 1e-12);
}

TEST_CASE("detect: clustered ladder passes, wrong prediction fails") {
  EssSpecPrediction pred;
  pred.points = {-1.0 / 6, 0.0, 1.0 / 6};
  auto ladder = clustered_ladder({-1.0 / 6, 0.0, 1.0 / 6});
  auto rep = detect_essential_spectrum(ladder, pred, 0.02);
  CHECK(rep.pass);
  CHECK(rep.ladder.back().capture >= 0.95);
  CHECK(rep.ladder.back().coverage >= 0.9);

  EssSpecPrediction wrong;
  wrong.points = {-0.4, 0.0, 0.4};
  auto bad = detect_essential_spectrum(ladder, wrong, 0.02);
  CHECK_FALSE(bad.pass);

  CHECK_THROWS_AS(detect_essential_spectrum({ladder[0]}, pred, 0.02), Error);
  CHECK_THROWS_AS(detect_essential_spectrum(ladder, pred, 0.0), Error);
}

TEST_CASE("detect: capture monotone in epsilon") {
  EssSpecPrediction pred;
  pred.points = {-1.0 / 6, 0.0, 1.0 / 6};
  auto ladder = clustered_ladder({-1.0 / 6, 0.0, 1.0 / 6}, 9);
  double last = 0;
  for (double eps : {0.005, 0.01, 0.02, 0.05}) {
    auto rep = detect_essential_spectrum(ladder, pred, eps);
    CHECK(rep.ladder.back().capture >= last - 1e-12);
    last = rep.ladder.back().capture;
  }
}

TEST_CASE("detect: interval coverage") {
  EssSpecPrediction pred;
  pred.points = {0.0};
  pred.intervals = {{-0.2, -1.0 / 6}, {1.0 / 6, 0.2}};
  // eigenvalues sweeping the positive interval only
  std::vector<double> eigs = {0.0};
  for (int k = 0; k <= 50; ++k) eigs.push_back(1.0 / 6 + (0.2 - 1.0 / 6) * k / 50.0);
  auto s = synthetic(eigs);
  auto rep = detect_essential_spectrum({s, s, s}, pred, 0.02);
  // the positive interval is fully covered, the negative one not at all
  CHECK(rep.ladder.back().coverage == Catch::Approx((1.0 + 1.0 + 0.0) / 3).margin(1e-12));
}

TEST_CASE("decay fit: synthetic power law") {
  std::vector<double> eigs;
  for (int j = 1; j <= 500; ++j) eigs.push_back(std::pow(j, -0.5));
  EssSpecPrediction pred;
  pred.points = {0.0};
  auto fit = decay_fit(synthetic(eigs), 0.0, Side::above, FitMode::power, 1, 200, pred, 1e-14);
  CHECK(std::abs(fit.value + 0.5) < 1e-6);
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("decay fit: synthetic exponential law") {
  double k0 = 1.0 / 6;
  std::vector<double> eigs;
  for (int j = 1; j <= 60; ++j) eigs.push_back(k0 - std::exp(-0.3 * j));
  EssSpecPrediction pred;
  pred.points = {k0};
  auto fit = decay_fit(synthetic(eigs), k0, Side::below, FitMode::exponential, 1, 40, pred, 1e-14);
  CHECK(std::abs(fit.value - 0.3) < 1e-3);
}

TEST_CASE("decay fit: selection rules") {
  EssSpecPrediction pred;
  pred.points = {0.0, 1.0 / 6, -1.0 / 6};
  std::vector<double> eigs;
  for (int j = 1; j <= 40; ++j) eigs.push_back(std::pow(j, -0.5));
  // contaminate with a cluster near 1/6 that must be excluded
  for (int k = 0; k < 50; ++k) eigs.push_back(1.0 / 6 + 1e-3 * k / 50.0);
  auto fit = decay_fit(synthetic(eigs), 0.0, Side::above, FitMode::power, 1, 30, pred, 0.02);
  CHECK(std::abs(fit.value + 0.5) < 0.08);  // the cluster is filtered out

  // too few eigenvalues in the window
  std::vector<double> few = {0.5, 0.4, 0.3, 0.2, 0.1};
  CHECK_THROWS_AS(decay_fit(synthetic(few), 0.0, Side::above, FitMode::power, 1, 40, pred, 1e-12),
                  Error);
  CHECK_THROWS_AS(decay_fit(synthetic(eigs), 0.0, Side::above, FitMode::power, 5, 5, pred, 0.02),
                  Error);
}

TEST_CASE("decay fit: max_gap selection radius") {
  EssSpecPrediction pred;
  pred.points = {1.0 / 6, -1.0 / 6};
  std::vector<double> eigs;
  for (int j = 1; j <= 30; ++j) eigs.push_back(1.0 / 6 - std::exp(-0.4 * j));
  eigs.push_back(-5.0);  // far outlier that max_gap must exclude
  auto fit = decay_fit(synthetic(eigs), 1.0 / 6, Side::both, FitMode::exponential, 1, 20, pred,
                       1e-14, 0.5 * (1.0 / 6));
  CHECK(std::abs(fit.value - 0.4) < 0.05);
}

TEST_CASE("predicted decay exponents") {
  auto c = predicted_decay_exponent(TipKind::essential_point_constant);
  CHECK(c.exponent_bound == -0.5);
  CHECK_FALSE(c.limiting);
  auto n = predicted_decay_exponent(TipKind::nondegenerate_min);
  CHECK(n.exponent_bound == -1.0);
  CHECK(n.tau_bound == 1.0);
  CHECK(n.limiting);
  auto f = predicted_decay_exponent(TipKind::flat_min, 2);
  CHECK(f.tau_bound == Catch::Approx(1.5));
  CHECK(f.exponent_bound == Catch::Approx(-2.0 / 3));
  auto f3 = predicted_decay_exponent(TipKind::flat_min, 3);
  CHECK(f3.tau_bound == Catch::Approx(5.0 / 3));
  CHECK_THROWS_AS(predicted_decay_exponent(TipKind::flat_min, 1), Error);
}
