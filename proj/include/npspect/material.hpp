#pragma once

// Lame parameter fields over a boundary, convexity validation, and the
// derived constants that the layer-potential kernels and symbols consume.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "npspect/core.hpp"

namespace npspect {

struct LameParams {
  double lambda = 0;
  double mu = 0;
};

struct ConvexityVerdict {
  bool ok = false;
  std::string reason;  // names the failed inequality, empty when ok
};

/// Strong convexity: mu > 0 and d*lambda + 2*mu > 0.
inline ConvexityVerdict validate_convexity(const LameParams& p, int d) {
  require(d == 2 || d == 3, Errc::invalid_argument, "dimension must be 2 or 3");
  if (!(p.mu > 0)) return {false, "mu>0 failed"};
  if (!(d * p.lambda + 2 * p.mu > 0)) return {false, "d*lambda+2*mu>0 failed"};
  return {true, {}};
}

/// kappa0 = mu / (2 (lambda + 2 mu)). Lies in (0, 1/2) whenever
/// lambda + mu > 0, which convexity in either d = 2 or d = 3 implies.
inline double kappa0(const LameParams& p) {
  require(p.mu > 0 && p.lambda + p.mu > 0, Errc::invalid_argument,
          "kappa0 requires mu>0 and lambda+mu>0");
  return p.mu / (2 * (p.lambda + 2 * p.mu));
}

struct KelvinConstants {
  double lambda_prime = 0;  // (lambda+mu) / (4 pi mu (lambda+2mu))
  double mu_prime = 0;      // (lambda+3mu) / (4 pi mu (lambda+2mu))
  double delta_prime = 0;   // |lambda' - mu'| = 1 / (2 pi (lambda+2mu))
};

// The literal lambda'-mu' is negative; only |lambda'-mu'| enters kappa0 and
// the symbol eigenvalues, so delta_prime stores the absolute value.
inline KelvinConstants kelvin_constants(const LameParams& p) {
  auto v = validate_convexity(p, 3);
  require(v.ok, Errc::invalid_argument, "kelvin_constants: " + v.reason);
  const double den = 4 * kPi * p.mu * (p.lambda + 2 * p.mu);
  KelvinConstants k;
  k.lambda_prime = (p.lambda + p.mu) / den;
  k.mu_prime = (p.lambda + 3 * p.mu) / den;
  k.delta_prime = std::abs(k.lambda_prime - k.mu_prime);
  return k;
}

enum class FieldKind { Constant, PerComponentConstant, Variable };

inline const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Constant: return "constant";
    case FieldKind::PerComponentConstant: return "per_component";
    case FieldKind::Variable: return "variable";
  }
  return "?";
}

/// A Lame parameter field over the boundary. Evaluators must be pure and
/// deterministic; all built-in families are.
struct LameField {
  std::function<LameParams(const Vec3&)> eval;
  FieldKind classification = FieldKind::Constant;
  int component_count = 1;
  double delta = 0;        // uniform convexity margin where known
  std::string descriptor;  // stable id used for hashing and provenance

  LameParams operator()(const Vec3& x) const { return eval(x); }
  std::uint64_t hash() const { return hash_str(descriptor); }

  static LameField constant(LameParams p) {
    LameField f;
    f.eval = [p](const Vec3&) { return p; };
    f.classification = FieldKind::Constant;
    f.component_count = 1;
    f.delta = std::min(p.mu, 3 * p.lambda + 2 * p.mu);
    std::ostringstream os;
    os << "constant(lambda=" << p.lambda << ",mu=" << p.mu << ")";
    f.descriptor = os.str();
    return f;
  }

  static LameField per_component(std::vector<LameParams> table,
                                 std::function<int(const Vec3&)> component_of) {
    require(!table.empty(), Errc::invalid_argument, "per_component: empty table");
    LameField f;
    f.component_count = static_cast<int>(table.size());
    f.delta = 1e300;
    std::ostringstream os;
    os << "per_component[";
    for (const auto& p : table) {
      f.delta = std::min({f.delta, p.mu, 3 * p.lambda + 2 * p.mu});
      os << "(" << p.lambda << "," << p.mu << ")";
    }
    os << "]";
    f.descriptor = os.str();
    f.classification = FieldKind::PerComponentConstant;
    f.eval = [table = std::move(table), comp = std::move(component_of)](const Vec3& x) {
      int c = comp(x);
      require(c >= 0 && c < static_cast<int>(table.size()), Errc::invalid_argument,
              "per_component: component id out of range");
      return table[static_cast<std::size_t>(c)];
    };
    return f;
  }

  /// mu(x) = mu0 + mu1 * x3, lambda fixed. Smooth, with nondegenerate
  /// extrema at the poles of a sphere centred on the z axis.
  static LameField z_linear(double lambda, double mu0, double mu1) {
    LameField f;
    f.eval = [lambda, mu0, mu1](const Vec3& x) {
      return LameParams{lambda, mu0 + mu1 * x.z()};
    };
    f.classification = mu1 == 0 ? FieldKind::Constant : FieldKind::Variable;
    f.component_count = 1;
    std::ostringstream os;
    os << "z_linear(lambda=" << lambda << ",mu=" << mu0 << "+" << mu1 << "*z)";
    f.descriptor = os.str();
    return f;
  }

  /// mu(x) = mu0 + amp * exp(-|x-x0|^2 / width^2), lambda fixed.
  static LameField bump(double lambda, double mu0, double amp, const Vec3& x0,
                        double width) {
    require(width > 0, Errc::invalid_argument, "bump: width must be positive");
    LameField f;
    f.eval = [lambda, mu0, amp, x0, width](const Vec3& x) {
      double r2 = (x - x0).squaredNorm();
      return LameParams{lambda, mu0 + amp * std::exp(-r2 / (width * width))};
    };
    f.classification = amp == 0 ? FieldKind::Constant : FieldKind::Variable;
    f.component_count = 1;
    std::ostringstream os;
    os << "bump(lambda=" << lambda << ",mu0=" << mu0 << ",amp=" << amp
       << ",x0=(" << x0.x() << "," << x0.y() << "," << x0.z() << "),w=" << width << ")";
    f.descriptor = os.str();
    return f;
  }

  static LameField plugin(std::function<LameParams(const Vec3&)> f, FieldKind kind,
                          int components, std::string descriptor) {
    LameField out;
    out.eval = std::move(f);
    out.classification = kind;
    out.component_count = components;
    out.descriptor = std::move(descriptor);
    return out;
  }
};

/// Checks convexity at every sample and that the classification is
/// consistent with the sampled values. Returns the observed margin delta.
struct FieldValidation {
  bool ok = false;
  double delta = 0;
  std::string reason;
};

inline FieldValidation validate_field(const LameField& field,
                                      const std::vector<std::vector<Vec3>>& component_samples,
                                      int d = 3) {
  require(!component_samples.empty(), Errc::invalid_argument, "no component samples");
  FieldValidation out;
  out.delta = 1e300;
  bool all_const = true;
  for (const auto& comp : component_samples) {
    require(!comp.empty(), Errc::invalid_argument, "empty component sample");
    LameParams first = field(comp.front());
    for (const auto& x : comp) {
      LameParams p = field(x);
      auto v = validate_convexity(p, d);
      if (!v.ok) return {false, 0, "convexity violated: " + v.reason};
      out.delta = std::min({out.delta, p.mu, d * p.lambda + 2 * p.mu});
      if (std::abs(p.lambda - first.lambda) > 1e-12 * (1 + std::abs(first.lambda)) ||
          std::abs(p.mu - first.mu) > 1e-12 * (1 + std::abs(first.mu)))
        all_const = false;
    }
  }
  if (field.classification != FieldKind::Variable && !all_const)
    return {false, out.delta, "classification says locally constant, samples vary"};
  out.ok = true;
  return out;
}

struct Interval {
  double lo = 0, hi = 0;
  double length() const { return hi - lo; }
};

/// The analytic essential-spectrum prediction: isolated points (always
/// including 0) plus closed symmetric intervals.
struct EssSpecPrediction {
  std::vector<double> points;      // sorted ascending
  std::vector<Interval> intervals; // sorted by lo; symmetric pairs

  double distance(double x) const {
    double d = 1e300;
    for (double p : points) d = std::min(d, std::abs(x - p));
    for (const auto& iv : intervals) {
      if (x < iv.lo) d = std::min(d, iv.lo - x);
      else if (x > iv.hi) d = std::min(d, x - iv.hi);
      else return 0;
    }
    return d;
  }

  /// Distance from x to the prediction with the element nearest to `tip`
  /// removed; used when selecting eigenvalue sequences converging to one tip.
  double distance_excluding_tip(double x, double tip) const {
    double d = 1e300;
    for (double p : points)
      if (std::abs(p - tip) > 1e-14) d = std::min(d, std::abs(x - p));
    for (const auto& iv : intervals) {
      double dl = (x < iv.lo) ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0);
      bool tip_is_endpoint = std::abs(iv.lo - tip) < 1e-14 || std::abs(iv.hi - tip) < 1e-14;
      if (tip_is_endpoint) {
        // keep the interval as an excluded region except near the tip itself
        if (dl == 0 && std::abs(x - tip) > 1e-14) d = std::min(d, 0.0);
        continue;
      }
      d = std::min(d, dl);
    }
    return d;
  }

  std::size_t target_count() const { return points.size() + intervals.size(); }
};

/// Range of kappa0 over each boundary component: degenerate ranges become
/// point pairs +-kappa, nondegenerate ones closed intervals +-Delta. The
/// point 0 is always present.
inline EssSpecPrediction predict_essential_spectrum(
    const LameField& field, const std::vector<std::vector<Vec3>>& component_samples,
    double degeneracy_rel_tol = 1e-9) {
  require(!component_samples.empty(), Errc::invalid_argument,
          "predict_essential_spectrum: empty sample set");
  EssSpecPrediction out;
  out.points.push_back(0.0);

  std::vector<double> pos_points;
  std::vector<Interval> pos_intervals;
  for (const auto& comp : component_samples) {
    require(!comp.empty(), Errc::invalid_argument,
            "predict_essential_spectrum: empty component sample");
    if (field.classification == FieldKind::Constant ||
        field.classification == FieldKind::PerComponentConstant) {
      pos_points.push_back(kappa0(field(comp.front())));
      continue;
    }
    double kmin = 1e300, kmax = -1e300, ksum = 0;
    for (const auto& x : comp) {
      double k = kappa0(field(x));
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
      ksum += k;
    }
    double kmean = ksum / static_cast<double>(comp.size());
    if (kmax - kmin < degeneracy_rel_tol * kmean)
      pos_points.push_back(kmean);
    else
      pos_intervals.push_back({kmin, kmax});
  }

  // dedupe coincident points, merge overlapping intervals
  std::sort(pos_points.begin(), pos_points.end());
  pos_points.erase(std::unique(pos_points.begin(), pos_points.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   pos_points.end());
  std::sort(pos_intervals.begin(), pos_intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : pos_intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  // drop points swallowed by an interval
  pos_points.erase(std::remove_if(pos_points.begin(), pos_points.end(),
                                  [&](double p) {
                                    for (const auto& iv : merged)
                                      if (p >= iv.lo && p <= iv.hi) return true;
                                    return false;
                                  }),
                   pos_points.end());

  for (double p : pos_points) {
    out.points.push_back(p);
    out.points.push_back(-p);
  }
  for (const auto& iv : merged) {
    require(iv.lo > 0 && iv.hi < 0.5, Errc::invalid_argument,
            "essential-spectrum interval escapes (0, 1/2)");
    out.intervals.push_back(iv);
    out.intervals.push_back({-iv.hi, -iv.lo});
  }
  std::sort(out.points.begin(), out.points.end());
  std::sort(out.intervals.begin(), out.intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return out;
}

}  // namespace npspect
