#include <catch2/catch_amalgamated.hpp>

#include "npspect/oracle.hpp"

using namespace npspect;

TEST_CASE("sphere eigenvalue closed forms") {
  LameParams p{1, 1};
  auto t1 = sphere_eigenvalues(1, p);
  CHECK(t1.lambda0 == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(t1.lambdaPlus == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(t1.lambdaMinus == Catch::Approx(-1.0 / 18).epsilon(1e-15));
  CHECK(t1.multiplicity == 3);

  auto t2 = sphere_eigenvalues(2, p);
  CHECK(t2.lambda0 == Catch::Approx(0.3).epsilon(1e-15));
  CHECK(t2.lambdaPlus == Catch::Approx(1.0 / 90).epsilon(1e-15));
  CHECK(t2.lambdaMinus == Catch::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(t2.multiplicity == 5);

  auto t3 = sphere_eigenvalues(3, p);
  CHECK(t3.lambda0 == Catch::Approx(3.0 / 14).epsilon(1e-15));
  CHECK(t3.lambdaMinus == Catch::Approx(13.0 / 70).epsilon(1e-15));
  CHECK(t3.lambdaPlus == Catch::Approx(-1.0 / 14).epsilon(1e-15));

  CHECK_THROWS_AS(sphere_eigenvalues(0, p), Error);
}

TEST_CASE("lambda_j^0 independent of material, cluster sum exactly 3/2") {
  for (int j = 1; j <= 100; ++j) {
    CHECK(sphere_cluster_sum(j) == 1.5);
    double v1 = sphere_eigenvalues(j, {1, 1}).lambda0;
    double v2 = sphere_eigenvalues(j, {2, 1}).lambda0;
    double v3 = sphere_eigenvalues(j, {0.3, 2.4}).lambda0;
    CHECK(v1 == v2);
    CHECK(v1 == v3);
  }
}

TEST_CASE("branch limits: lambda^- -> +kappa0 and lambda^+ -> -kappa0 at rate 1/j") {
  LameParams p{1.7, 0.6};
  double k0 = kappa0(p);
  double prev_minus = 1e300, prev_plus = 1e300;
  for (int j : {10, 100, 1000, 10000, 100000, 1000000}) {
    auto t = sphere_eigenvalues(j, p);
    double gm = std::abs(t.lambdaMinus - k0);
    double gp = std::abs(t.lambdaPlus + k0);
    CHECK(gm < prev_minus);
    CHECK(gp < prev_plus);
    // O(1/j): j * gap stays bounded
    CHECK(j * gm < 2.0);
    CHECK(j * gp < 2.0);
    prev_minus = gm;
    prev_plus = gp;
  }
  auto t = sphere_eigenvalues(1000000, p);
  CHECK(std::abs(t.lambdaMinus - k0) < 1e-5);
  CHECK(std::abs(t.lambdaPlus + k0) < 1e-5);
}

TEST_CASE("matcher on a synthetic oracle spectrum") {
  LameParams p{1, 1};
  SpectrumResult s;
  for (int j = 1; j <= 30; ++j) {
    auto t = sphere_eigenvalues(j, p);
    for (int m = 0; m < t.multiplicity; ++m) {
      s.eigenvalues.push_back(t.lambda0);
      s.eigenvalues.push_back(t.lambdaPlus);
      s.eigenvalues.push_back(t.lambdaMinus);
    }
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  auto rep = match_spectrum_to_oracle(s, p, 4);
  CHECK(rep.all_values_matched());
  CHECK(rep.multiplicities_exact_where_certifiable());
  CHECK(rep.certifiable_count() >= 3);

  // the merged rigid row carries multiplicity 6 and sits at 1/2
  bool found_rigid = false;
  for (const auto& r : rep.rows)
    if (r.j == 1 && r.branch.find(',') != std::string::npos) {
      found_rigid = true;
      CHECK(r.expected_multiplicity == 6);
      CHECK(r.value == Catch::Approx(0.5));
      CHECK(r.observed_multiplicity == 6);
      CHECK(r.rel_error < 1e-12);
    }
  CHECK(found_rigid);

  // lambda_2^- = kappa0 exactly: tolerated inside the essential cluster
  for (const auto& r : rep.rows)
    if (r.j == 2 && r.branch.find('-') != std::string::npos) CHECK(r.inside_essential);

  CHECK_THROWS_AS(match_spectrum_to_oracle(s, p, 0), Error);
}
