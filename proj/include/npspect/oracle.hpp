#pragma once

// Closed-form sphere eigenvalue series and the matcher that compares a
// discrete spectrum against them.
//
// lambda_j^0 = 3/(2(2j+1))                                (material-independent)
// lambda_j^+ = (3 lambda - 2 mu (2j^2-2j-3)) / (2(lambda+2mu)(4j^2-1))
// lambda_j^- = (-3 lambda + 2 mu (2j^2+2j-3)) / (2(lambda+2mu)(4j^2-1))
// each with multiplicity 2j+1. From the closed forms, lambda_j^- accumulates
// at +kappa0 and lambda_j^+ at -kappa0; the matcher uses these computed
// limits, not the superscript labels.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "npspect/core.hpp"
#include "npspect/material.hpp"
#include "npspect/spectral.hpp"

namespace npspect {

struct SphereEigenTriple {
  int j = 0;
  double lambda0 = 0, lambdaPlus = 0, lambdaMinus = 0;
  int multiplicity = 0;  // 2j+1
};

inline SphereEigenTriple sphere_eigenvalues(int j, const LameParams& p) {
  require(j >= 1, Errc::invalid_argument, "sphere_eigenvalues: j >= 1");
  auto v = validate_convexity(p, 3);
  require(v.ok, Errc::invalid_argument, "sphere_eigenvalues: " + v.reason);
  SphereEigenTriple t;
  t.j = j;
  t.multiplicity = 2 * j + 1;
  const double jj = j;
  const double den = 2 * (p.lambda + 2 * p.mu) * (4 * jj * jj - 1);
  t.lambda0 = 3.0 / (2 * (2 * jj + 1));
  t.lambdaPlus = (3 * p.lambda - 2 * p.mu * (2 * jj * jj - 2 * jj - 3)) / den;
  t.lambdaMinus = (-3 * p.lambda + 2 * p.mu * (2 * jj * jj + 2 * jj - 3)) / den;
  return t;
}

/// (2j+1) * lambda_j^0 = 3/2 exactly, for every j; evaluated as one
/// correctly-rounded quotient of exact integers so the cancellation is
/// exact in floating point too.
inline double sphere_cluster_sum(int j) {
  require(j >= 1, Errc::invalid_argument, "sphere_cluster_sum: j >= 1");
  const double m = 2.0 * j + 1.0;
  return (m * 3.0) / (2.0 * m);
}

struct OracleMatchRow {
  int j = 0;
  std::string branch;           // "0", "+", "-" (or merged like "0,+")
  double value = 0;             // oracle value (merged rows share it)
  int expected_multiplicity = 0;
  std::size_t observed_multiplicity = 0;
  double cluster_mean = 0;
  double rel_error = 1e300;     // |mean - value| / |value|
  bool inside_essential = false;  // oracle value within ess_eps of {0, +-kappa0}
  bool isolated = true;           // window free of other oracle/essential values
  // At finite N the not-yet-converged high modes sweep a band between the
  // essential points; multiplicity counts are certifiable only for values
  // outside that band (|v| > kappa0 + ess_eps) with an uncontested window.
  bool mult_certifiable = false;
  bool value_matched = false;     // rel_error <= rel_tol
};

struct OracleMatchReport {
  std::vector<OracleMatchRow> rows;
  double rel_tol = 0.05;
  double ess_eps = 0.02;
  std::size_t unclustered = 0;  // eigenvalues beyond tolerance of every target

  /// Every oracle value outside the essential clusters has a matching
  /// discrete cluster; in-essential values are tolerated (their windows sit
  /// inside the essential cluster and carry no independent information).
  bool all_values_matched() const {
    for (const auto& r : rows)
      if (!r.inside_essential && !r.value_matched) return false;
    return true;
  }
  bool multiplicities_exact_where_certifiable() const {
    for (const auto& r : rows)
      if (r.mult_certifiable &&
          r.observed_multiplicity != static_cast<std::size_t>(r.expected_multiplicity))
        return false;
    return true;
  }
  std::size_t certifiable_count() const {
    std::size_t c = 0;
    for (const auto& r : rows) c += r.mult_certifiable ? 1 : 0;
    return c;
  }
};

/// Greedy-clusters the discrete spectrum around the oracle values for
/// j <= j_max. Assignment targets include higher branches (j <= j_internal)
/// and the essential points {0, +-kappa0} as sinks, so bulk eigenvalues do
/// not contaminate low-j clusters. Oracle values inside essential clusters,
/// or with another target closer than the match window plus a discretization
/// slack, are tolerated: their multiplicity is reported but not certified.
inline OracleMatchReport match_spectrum_to_oracle(const SpectrumResult& spectrum,
                                                  const LameParams& p, int j_max,
                                                  double rel_tol = 0.05,
                                                  double ess_eps = 0.02,
                                                  double disc_slack = 0.01) {
  require(j_max >= 1, Errc::invalid_argument, "match_spectrum_to_oracle: j_max >= 1");
  OracleMatchReport rep;
  rep.rel_tol = rel_tol;
  rep.ess_eps = ess_eps;
  const double k0 = kappa0(p);
  const int j_internal = std::max(64, 4 * j_max);

  struct Target {
    double value;
    int j;                 // 0 for essential sinks
    std::string branch;    // "ess" for sinks
    int expected = 0;
  };
  std::vector<Target> targets;
  targets.push_back({0.0, 0, "ess", 0});
  targets.push_back({k0, 0, "ess", 0});
  targets.push_back({-k0, 0, "ess", 0});
  for (int j = 1; j <= j_internal; ++j) {
    auto t = sphere_eigenvalues(j, p);
    targets.push_back({t.lambda0, j, "0", t.multiplicity});
    targets.push_back({t.lambdaPlus, j, "+", t.multiplicity});
    targets.push_back({t.lambdaMinus, j, "-", t.multiplicity});
  }

  // merge coincident targets (e.g. lambda_1^0 = lambda_1^+ = 1/2)
  std::vector<int> group(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) group[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t l = 0; l < i; ++l)
      if (std::abs(targets[i].value - targets[l].value) < 1e-12 &&
          targets[l].branch != "ess" && targets[i].branch != "ess")
        group[i] = group[l];

  // nearest-target assignment
  std::vector<std::vector<double>> members(targets.size());
  for (std::size_t e = 0; e < spectrum.eigenvalues.size(); ++e) {
    double v = spectrum.eigenvalues[e];
    double best = 1e300;
    std::size_t bi = 0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      double d = std::abs(v - targets[t].value);
      if (d < best) {
        best = d;
        bi = t;
      }
    }
    members[static_cast<std::size_t>(group[bi])].push_back(v);
  }

  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t].branch == "ess" || targets[t].j > j_max) continue;
    if (group[t] != static_cast<int>(t)) continue;  // merged into an earlier row
    OracleMatchRow row;
    row.j = targets[t].j;
    row.branch = targets[t].branch;
    row.value = targets[t].value;
    row.expected_multiplicity = targets[t].expected;
    for (std::size_t u = t + 1; u < targets.size(); ++u)
      if (group[u] == static_cast<int>(t)) {
        row.expected_multiplicity += targets[u].expected;
        row.branch += "," + targets[u].branch;
      }
    row.inside_essential = std::min({std::abs(row.value), std::abs(row.value - k0),
                                     std::abs(row.value + k0)}) <= ess_eps;
    const double window = rel_tol * std::abs(row.value);
    double nearest_other = 1e300;
    for (std::size_t u = 0; u < targets.size(); ++u)
      if (group[u] != static_cast<int>(t))
        nearest_other = std::min(nearest_other, std::abs(row.value - targets[u].value));
    row.isolated = nearest_other > window + disc_slack;
    row.mult_certifiable =
        !row.inside_essential && row.isolated && std::abs(row.value) > k0 + ess_eps;

    // multiplicity counts only eigenvalues assigned to this target by the
    // nearest-value rule; value matching asks whether any spectral mass at
    // all sits inside the window
    const auto& mem = members[t];
    std::size_t in_window = 0;
    double sum = 0;
    for (double v : mem)
      if (std::abs(v - row.value) <= window) {
        ++in_window;
        sum += v;
      }
    row.observed_multiplicity = in_window;
    std::size_t any = 0;
    double any_sum = 0;
    for (double v : spectrum.eigenvalues)
      if (std::abs(v - row.value) <= window) {
        ++any;
        any_sum += v;
      }
    if (in_window) {
      row.cluster_mean = sum / static_cast<double>(in_window);
    } else if (any) {
      row.cluster_mean = any_sum / static_cast<double>(any);
    }
    if (any) {
      row.rel_error = std::abs(row.cluster_mean - row.value) / std::abs(row.value);
      row.value_matched = row.rel_error <= rel_tol;
    }
    rep.rows.push_back(row);
  }

  for (std::size_t e = 0; e < spectrum.eigenvalues.size(); ++e) {
    double v = spectrum.eigenvalues[e];
    double best = 1e300;
    for (const auto& t : targets) best = std::min(best, std::abs(v - t.value));
    if (best > std::max(rel_tol * std::abs(v), ess_eps)) ++rep.unclustered;
  }
  std::sort(rep.rows.begin(), rep.rows.end(), [](const OracleMatchRow& a, const OracleMatchRow& b) {
    return a.j != b.j ? a.j < b.j : a.branch < b.branch;
  });
  return rep;
}

}  // namespace npspect
