#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "npspect/geometry.hpp"
#include "npspect/symbol.hpp"

using namespace npspect;

namespace {
std::mt19937_64 rng(23);
Vec3 rand_vec() {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec3 v;
  do
    v = Vec3(u(rng), u(rng), u(rng));
  while (v.norm() < 0.1);
  return v;
}
}  // namespace

TEST_CASE("lame symbol at the pole direction") {
  LameParams p{1, 1};
  Mat3 l = lame_symbol(Vec3(0, 0, 1), p);
  Mat3 expect = -Eigen::Vector3d(1, 1, 3).asDiagonal().toDenseMatrix();
  CHECK((l - expect).norm() < 1e-15);
  Mat3 li = lame_symbol_inverse(Vec3(0, 0, 1), p);
  Mat3 expect_i = -Eigen::Vector3d(1, 1, 1.0 / 3).asDiagonal().toDenseMatrix();
  CHECK((li - expect_i).norm() < 1e-15);
  CHECK_THROWS_AS(lame_symbol(Vec3::Zero(), p), Error);
}

TEST_CASE("projector, inverse, homogeneity, ellipticity") {
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 30; ++t) {
    LameParams p{u(rng) + 1.2, std::abs(u(rng)) + 0.2};
    Vec3 xi = rand_vec();
    Mat3 L = xi_projector(xi);
    CHECK((L * L - L).norm() < 1e-14);
    CHECK((lame_symbol(xi, p) * lame_symbol_inverse(xi, p) - Mat3::Identity()).norm() < 1e-13);
    double s = 2.7;
    CHECK((lame_symbol_inverse(s * xi, p) - lame_symbol_inverse(xi, p) / (s * s)).norm() < 1e-13);

    Eigen::Vector3cd v(std::complex<double>(u(rng), u(rng)), std::complex<double>(u(rng), u(rng)),
                       std::complex<double>(u(rng), u(rng)));
    std::complex<double> q = -(lame_symbol(xi, p).cast<std::complex<double>>() * v).dot(v);
    double rhs = p.mu * xi.squaredNorm() * v.squaredNorm() +
                 (p.lambda + p.mu) * std::norm(xi.cast<std::complex<double>>().dot(v));
    CHECK(std::abs(q.real() - rhs) + std::abs(q.imag()) < 1e-12);
  }
}

TEST_CASE("the three scalar line integrals") {
  for (double s : {0.5, 1.0, 3.0}) {
    auto li = np_line_integrals(s);
    CHECK(std::abs(li.inv_xi2 - kPi / s) < 1e-8);
    CHECK(std::abs(li.xi32_xi4 - kPi / (2 * s)) < 1e-8);
    CHECK(std::abs(li.inv_xi4 - kPi / (2 * s * s * s)) < 1e-8);
  }
}

TEST_CASE("single layer symbol: closed form vs line integral") {
  for (LameParams p : {LameParams{1, 1}, LameParams{0, 1}, LameParams{2, 0.5}}) {
    for (int t = 0; t < 4; ++t) {
      double a = kPi * t / 4.0;
      Vec2 xip(1.7 * std::cos(a) + 0.1, 1.7 * std::sin(a));
      Mat3 c = single_layer_symbol(xip, p, SymbolMode::closed_form);
      Mat3 n = single_layer_symbol(xip, p, SymbolMode::numeric_line_integral);
      CHECK((c - n).norm() < 1e-6 * c.norm());
      double s = 3.0;
      Mat3 cs = single_layer_symbol(s * xip, p, SymbolMode::closed_form);
      CHECK((cs - c / s).norm() < 1e-13);
      // order -1 positive operator: SPD symbol
      Eigen::SelfAdjointEigenSolver<Mat3> es(c);
      CHECK(es.eigenvalues()(0) > 0);
    }
  }
  CHECK_THROWS_AS(single_layer_symbol(Vec2::Zero(), LameParams{1, 1}), Error);
}

TEST_CASE("np symbol: hermitian with eigenvalues {0, +-kappa0}") {
  LameParams p{1, 1};
  auto ev = hermitian_eigenvalues(np_symbol(Vec2(1, 0), p));
  CHECK(std::abs(ev[0] + 1.0 / 6) < 1e-12);
  CHECK(std::abs(ev[1]) < 1e-12);
  CHECK(std::abs(ev[2] - 1.0 / 6) < 1e-12);

  // rotation invariance of the eigenvalues
  for (int k = 0; k < 8; ++k) {
    double a = 2 * kPi * k / 8;
    auto e2 = hermitian_eigenvalues(np_symbol(Vec2(std::cos(a), std::sin(a)), p));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e2[static_cast<std::size_t>(i)] - ev[static_cast<std::size_t>(i)]) < 1e-13);
  }
  Mat3c sb = np_symbol(Vec2(0.3, -0.8), p);
  CHECK((sb - sb.adjoint()).norm() < 1e-14);
  CHECK_THROWS_AS(np_symbol(Vec2::Zero(), p), Error);
}

TEST_CASE("variable-field symbol eigenvalues are {0, +-kappa0(x)}") {
  auto field = LameField::z_linear(1.0, 1.5, 0.5);
  for (double z : {-1.0, -0.3, 0.4, 1.0}) {
    Vec3 x(std::sqrt(std::max(0.0, 1 - z * z)), 0, z);
    double k = kappa0(field(x));
    auto ev = hermitian_eigenvalues(np_symbol_at(x, Vec2(0.6, 0.8), field));
    CHECK(std::abs(ev[0] + k) < 1e-12);
    CHECK(std::abs(ev[2] - k) < 1e-12);
  }
}

TEST_CASE("modified symbol eigenvalues are exactly {0, +-1}") {
  auto field = LameField::z_linear(1.0, 1.5, 0.5);
  for (double z : {-0.9, 0.0, 0.7}) {
    Vec3 x(std::sqrt(1 - z * z), 0, z);
    auto ev = hermitian_eigenvalues(np_symbol_modified(x, Vec2(1, 1), field));
    CHECK(std::abs(ev[0] + 1) < 1e-12);
    CHECK(std::abs(ev[1]) < 1e-12);
    CHECK(std::abs(ev[2] - 1) < 1e-12);
  }
}

TEST_CASE("spectral mapping: p(sigma_B) vanishes") {
  LameParams p{1, 1};
  double k0 = kappa0(p);
  Mat3c sb = np_symbol(Vec2(0.7, -0.2), p);
  Mat3c pb = sb * (sb * sb - k0 * k0 * Mat3c::Identity());
  CHECK(pb.norm() < 1e-14);

  // per-component polynomial for a two-material configuration
  double k1 = kappa0({1, 1}), k2 = kappa0({1, 2});
  for (double kk : {k1, k2}) {
    Mat3c s = (kk / k0) * sb;  // symbol at a point with kappa0 = kk
    Mat3c q = s * (s * s - k1 * k1 * Mat3c::Identity()) * (s * s - k2 * k2 * Mat3c::Identity());
    CHECK(q.norm() < 1e-14);
  }
}

TEST_CASE("symbol-level essential spectrum agrees with the material prediction") {
  auto sph = make_sphere(1.0);
  auto samples = sample_components({sph}, 24, 48);

  auto cfield = LameField::constant({1, 1});
  auto sp = symbol_essential_spectrum(cfield, samples);
  REQUIRE(sp.points.size() == 3);
  CHECK(std::abs(sp.points[0] + 1.0 / 6) < 1e-12);
  CHECK(std::abs(sp.points[2] - 1.0 / 6) < 1e-12);

  auto vfield = LameField::z_linear(1.0, 1.5, 0.5);
  auto sv = symbol_essential_spectrum(vfield, samples);
  auto mv = predict_essential_spectrum(vfield, samples);
  CHECK(prediction_hausdorff(sv, mv) < 1e-3);
}
