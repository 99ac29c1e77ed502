#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "npspect/geometry.hpp"

using namespace npspect;

TEST_CASE("gauss legendre rule") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  double s = 0, s2 = 0;
  for (int i = 0; i < 16; ++i) {
    s += w[i];
    s2 += w[i] * x[i] * x[i];
  }
  CHECK(s == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(s2 == Catch::Approx(2.0 / 3).epsilon(1e-13));
}

TEST_CASE("sphere chart and normals") {
  auto s = make_sphere(1.0);
  Vec3 p = s.chart(kPi / 2, 0.0);
  CHECK((p - Vec3(1, 0, 0)).norm() < 1e-14);
  auto g = build_grid(s, 16, 32);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(g.normals[i].norm() - 1.0) < 1e-12);
    // sphere normal is radial
    CHECK((g.normals[i] - g.nodes[i]).norm() < 1e-12);
  }
  CHECK(g.area() == Catch::Approx(4 * kPi).margin(1e-10));
  CHECK_THROWS_AS(make_sphere(0.0), Error);
  CHECK_THROWS_AS(make_sphere(-1.0), Error);
}

TEST_CASE("flux identity = 3 volume") {
  auto g2 = build_grid(make_sphere(2.0), 16, 32);
  CHECK(g2.flux() == Catch::Approx(32 * kPi).epsilon(1e-10));
  auto ge = build_grid(make_ellipsoid(2, 1, 1), 24, 48);
  CHECK(ge.flux() == Catch::Approx(8 * kPi).epsilon(1e-8));
}

TEST_CASE("ellipsoid degenerates and rejects") {
  CHECK_THROWS_AS(make_ellipsoid(1, 1, 0), Error);
  auto gs = build_grid(make_sphere(1.0), 12, 24);
  auto ge = build_grid(make_ellipsoid(1, 1, 1), 12, 24);
  REQUIRE(gs.size() == ge.size());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    CHECK((gs.nodes[i] - ge.nodes[i]).norm() < 1e-13);
    CHECK(gs.weights[i] == Catch::Approx(ge.weights[i]).epsilon(1e-12));
  }
}

TEST_CASE("grid refinement improves area and flux") {
  double area_err[3], flux_err[3];
  int k = 0;
  const double area_ref = [] {
    // fine reference for the (2,1,1) ellipsoid area
    auto g = build_grid(make_ellipsoid(2, 1, 1), 96, 192);
    return g.area();
  }();
  for (int n : {8, 16, 32}) {
    auto g = build_grid(make_ellipsoid(2, 1, 1), n, 2 * n);
    area_err[k] = std::abs(g.area() - area_ref);
    flux_err[k] = std::abs(g.flux() - 8 * kPi);
    ++k;
  }
  CHECK(area_err[1] < area_err[0]);
  CHECK(area_err[2] < area_err[1]);
  // the flux integrand is polynomial in the chart, so the error can sit at
  // the rounding floor from the coarsest grid on
  CHECK((flux_err[1] < flux_err[0] || flux_err[1] < 1e-11));
  CHECK((flux_err[2] < flux_err[1] || flux_err[2] < 1e-11));
}

TEST_CASE("grid arrays consistent; undersized rejected") {
  auto g = build_grid(make_sphere(1.0), 8, 16);
  CHECK(g.nodes.size() == g.normals.size());
  CHECK(g.nodes.size() == g.weights.size());
  CHECK(g.nodes.size() == g.patch_radius.size());
  CHECK(g.nodes.size() == g.cells.size());
  for (double w : g.weights) CHECK(w > 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(g.patch_radius[i] == Catch::Approx(std::sqrt(g.weights[i] / kPi)));
  CHECK_THROWS_AS(build_grid(make_sphere(1.0), 3, 16), Error);
  CHECK_THROWS_AS(build_grid(make_sphere(1.0), 8, 3), Error);
}

TEST_CASE("sphere curvature data") {
  auto g = build_grid(make_sphere(2.0), 8, 16);
  REQUIRE(g.has_curvature);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.mean_curvature[i] == Catch::Approx(0.5).epsilon(1e-10));
    // Q = (1/R)(E - nu nu^T) on a sphere of radius R
    Mat3 expect = 0.5 * (Mat3::Identity() - g.normals[i] * g.normals[i].transpose());
    CHECK((g.curvature_tensor[i] - expect).norm() < 1e-10);
  }
}

TEST_CASE("two-component grid keeps component ids and hash changes") {
  auto s1 = make_sphere(1.0);
  auto s2 = make_sphere(1.0, Vec3(5, 0, 0));
  s2.component_id = 1;
  auto g = build_grid({s1, s2}, 8, 16);
  CHECK(g.size() == 2 * 8 * 16);
  CHECK(g.component.front() == 0);
  CHECK(g.component.back() == 1);
  auto g1 = build_grid(s1, 8, 16);
  CHECK(g.hash != g1.hash);
  CHECK(g.flux() == Catch::Approx(2 * 3 * (4.0 / 3.0) * kPi).epsilon(1e-9));
}

TEST_CASE("csv export shape") {
  auto g = build_grid(make_sphere(1.0), 8, 16);
  std::ostringstream os;
  write_grid_csv(g, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y,z,nx,ny,nz,w");
  std::size_t rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == g.size());
}
