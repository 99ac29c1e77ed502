#pragma once

// Spectrum extraction, essential-spectrum cluster detection across a
// refinement ladder, and eigenvalue decay-rate fitting.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "npspect/assembly.hpp"
#include "npspect/core.hpp"
#include "npspect/eigensolve.hpp"
#include "npspect/material.hpp"

namespace npspect {

struct SpectrumResult {
  std::vector<double> eigenvalues;  // sorted ascending (real parts)
  std::vector<double> imag;         // aligned imaginary parts; empty on the symmetric path
  double max_imag_abs = 0;
  MatrixKind source = MatrixKind::SymmetrizedNP;
  int dim = 3;
  std::size_t n_nodes = 0;
  std::string grid_desc, field_desc;

  double imag_at(std::size_t i) const { return imag.empty() ? 0.0 : imag[i]; }
};

/// Symmetric solve for SingleLayer/SymmetrizedNP; general complex solve
/// (with imaginary parts reported) for NP/ModifiedNP.
inline SpectrumResult eigenvalues(const OperatorMatrix& om) {
  SpectrumResult out;
  out.source = om.kind;
  out.dim = om.dim;
  out.n_nodes = om.n_nodes;
  out.grid_desc = om.grid_desc;
  out.field_desc = om.field_desc;
  if (om.kind == MatrixKind::SingleLayer || om.kind == MatrixKind::SymmetrizedNP) {
    out.eigenvalues = sym_eigenvalues(om.m);
    return out;
  }
  Eigen::VectorXd re, im;
  general_eigenvalues(om.m, re, im);
  std::vector<std::size_t> idx(static_cast<std::size_t>(re.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return re(static_cast<Eigen::Index>(a)) < re(static_cast<Eigen::Index>(b));
  });
  out.eigenvalues.reserve(idx.size());
  out.imag.reserve(idx.size());
  for (std::size_t k : idx) {
    out.eigenvalues.push_back(re(static_cast<Eigen::Index>(k)));
    out.imag.push_back(im(static_cast<Eigen::Index>(k)));
    out.max_imag_abs = std::max(out.max_imag_abs, std::abs(im(static_cast<Eigen::Index>(k))));
  }
  return out;
}

namespace detail {

inline double dist_to_point(double re, double im, double p) {
  return std::hypot(re - p, im);
}

inline double dist_to_prediction(double re, double im, const EssSpecPrediction& pred) {
  double d = 1e300;
  for (double p : pred.points) d = std::min(d, dist_to_point(re, im, p));
  for (const auto& iv : pred.intervals) {
    double dre = (re < iv.lo) ? iv.lo - re : (re > iv.hi ? re - iv.hi : 0.0);
    d = std::min(d, std::hypot(dre, im));
  }
  return d;
}

/// Fraction of [lo,hi] within eps of some eigenvalue (on the real axis).
inline double interval_coverage(const Interval& iv, const SpectrumResult& s, double eps) {
  std::vector<Interval> cover;
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    double im = s.imag_at(i);
    if (std::abs(im) > eps) continue;
    double w = std::sqrt(eps * eps - im * im);
    double lo = std::max(iv.lo, s.eigenvalues[i] - w);
    double hi = std::min(iv.hi, s.eigenvalues[i] + w);
    if (lo < hi) cover.push_back({lo, hi});
  }
  std::sort(cover.begin(), cover.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double len = 0, edge = iv.lo;
  for (const auto& c : cover) {
    double lo = std::max(edge, c.lo);
    if (c.hi > lo) {
      len += c.hi - lo;
      edge = c.hi;
    }
  }
  return iv.length() > 0 ? len / iv.length() : 1.0;
}

}  // namespace detail

struct LadderLevel {
  std::string grid;
  std::size_t n_eigenvalues = 0;
  double capture = 0;   // fraction of eigenvalues within eps of the predicted set
  double coverage = 0;  // mean per-target coverage (points hit, interval fraction)
};

struct TargetCapture {
  double point = 0;      // the point, or the interval midpoint
  bool is_interval = false;
  std::size_t assigned = 0;  // eigenvalues with this target nearest
  double capture = 0;        // fraction of those within eps
};

struct ClusterReport {
  EssSpecPrediction prediction;
  double eps = 0;
  std::vector<LadderLevel> ladder;
  std::vector<TargetCapture> per_target;          // finest level
  std::vector<double> nearest_target_distance;    // finest level, per eigenvalue
  bool capture_nondecreasing = false;
  bool coverage_nondecreasing = false;
  bool pass = false;
  double capture_threshold = 0.95;
  double coverage_threshold = 0.90;
};

/// Capture fraction = share of all eigenvalues within eps of the predicted
/// set. Coverage = mean over targets (each point: hit or not; each interval:
/// covered length fraction). Pass = both nondecreasing along the ladder and
/// capture >= 0.95, coverage >= 0.9 at the finest level.
inline ClusterReport detect_essential_spectrum(const std::vector<SpectrumResult>& ladder,
                                               const EssSpecPrediction& pred, double eps) {
  require(ladder.size() >= 3, Errc::invalid_argument,
          "detect_essential_spectrum: need at least 3 refinement levels");
  require(eps > 0, Errc::invalid_argument, "detect_essential_spectrum: eps > 0");
  ClusterReport rep;
  rep.prediction = pred;
  rep.eps = eps;

  for (const auto& s : ladder) {
    LadderLevel lv;
    lv.grid = s.grid_desc;
    lv.n_eigenvalues = s.eigenvalues.size();
    std::size_t captured = 0;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      if (detail::dist_to_prediction(s.eigenvalues[i], s.imag_at(i), pred) <= eps) ++captured;
    lv.capture = s.eigenvalues.empty() ? 0 : static_cast<double>(captured) /
                                                 static_cast<double>(s.eigenvalues.size());
    double cov = 0;
    for (double p : pred.points) {
      bool hit = false;
      for (std::size_t i = 0; i < s.eigenvalues.size() && !hit; ++i)
        hit = detail::dist_to_point(s.eigenvalues[i], s.imag_at(i), p) <= eps;
      cov += hit ? 1.0 : 0.0;
    }
    for (const auto& iv : pred.intervals) cov += detail::interval_coverage(iv, s, eps);
    lv.coverage = pred.target_count() ? cov / static_cast<double>(pred.target_count()) : 1.0;
    rep.ladder.push_back(lv);
  }

  // finest-level per-target assignment and distances
  const SpectrumResult& fin = ladder.back();
  std::vector<TargetCapture> targets;
  for (double p : pred.points) targets.push_back({p, false, 0, 0});
  for (const auto& iv : pred.intervals) targets.push_back({0.5 * (iv.lo + iv.hi), true, 0, 0});
  std::vector<std::size_t> hit(targets.size(), 0);
  for (std::size_t i = 0; i < fin.eigenvalues.size(); ++i) {
    double re = fin.eigenvalues[i], im = fin.imag_at(i);
    double best = 1e300;
    std::size_t bi = 0;
    std::size_t t = 0;
    for (double p : pred.points) {
      double d = detail::dist_to_point(re, im, p);
      if (d < best) { best = d; bi = t; }
      ++t;
    }
    for (const auto& iv : pred.intervals) {
      double dre = (re < iv.lo) ? iv.lo - re : (re > iv.hi ? re - iv.hi : 0.0);
      double d = std::hypot(dre, im);
      if (d < best) { best = d; bi = t; }
      ++t;
    }
    rep.nearest_target_distance.push_back(best);
    targets[bi].assigned++;
    if (best <= eps) hit[bi]++;
  }
  for (std::size_t t = 0; t < targets.size(); ++t)
    targets[t].capture = targets[t].assigned
                             ? static_cast<double>(hit[t]) / static_cast<double>(targets[t].assigned)
                             : 0.0;
  rep.per_target = std::move(targets);

  rep.capture_nondecreasing = true;
  rep.coverage_nondecreasing = true;
  for (std::size_t i = 1; i < rep.ladder.size(); ++i) {
    if (rep.ladder[i].capture < rep.ladder[i - 1].capture - 1e-9)
      rep.capture_nondecreasing = false;
    if (rep.ladder[i].coverage < rep.ladder[i - 1].coverage - 1e-9)
      rep.coverage_nondecreasing = false;
  }
  rep.pass = rep.capture_nondecreasing && rep.coverage_nondecreasing &&
             rep.ladder.back().capture >= rep.capture_threshold &&
             rep.ladder.back().coverage >= rep.coverage_threshold;
  return rep;
}

enum class Side { above, below, both };
enum class FitMode { power, exponential };

struct DecayFit {
  double tip = 0;
  Side side = Side::above;
  FitMode mode = FitMode::power;
  double value = 0;     // exponent (power mode, slope) or rate (exponential mode, -slope)
  double residual = 0;  // RMS residual of the least-squares fit
  int j_min = 0, j_max = 0;
  std::size_t n_selected = 0;
  std::vector<double> gaps;  // |lambda_n - tip|, ordered descending, full sequence
};

/// Fits the decay of the eigenvalue sequence converging to `tip`.
/// Selection: eigenvalues on the chosen side of the tip, outside the rest of
/// the predicted essential set by `exclusion_eps` and within `max_gap` of the
/// tip, ordered by distance to the tip descending (the approach order),
/// indexed n = 1, 2, .... Power mode fits log|lambda_n - tip| against log n;
/// exponential mode against n.
inline DecayFit decay_fit(const SpectrumResult& spectrum, double tip, Side side,
                          FitMode mode, int j_min, int j_max,
                          const EssSpecPrediction& pred, double exclusion_eps = 0.02,
                          double max_gap = 1e300) {
  require(j_min >= 1 && j_max > j_min, Errc::invalid_argument, "decay_fit: bad window");
  DecayFit fit;
  fit.tip = tip;
  fit.side = side;
  fit.mode = mode;
  fit.j_min = j_min;
  fit.j_max = j_max;

  std::vector<double> gaps;
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    double v = spectrum.eigenvalues[i];
    if (std::abs(spectrum.imag_at(i)) > exclusion_eps) continue;
    if (side == Side::above && !(v > tip)) continue;
    if (side == Side::below && !(v < tip)) continue;
    if (std::abs(v - tip) > max_gap) continue;
    if (pred.distance_excluding_tip(v, tip) < exclusion_eps) continue;
    gaps.push_back(std::abs(v - tip));
  }
  std::sort(gaps.begin(), gaps.end(), std::greater<double>());
  fit.gaps = gaps;
  fit.n_selected = gaps.size();

  std::vector<double> xs, ys;
  for (int n = j_min; n <= j_max && n <= static_cast<int>(gaps.size()); ++n) {
    double g = gaps[static_cast<std::size_t>(n - 1)];
    if (g <= 0) break;
    xs.push_back(mode == FitMode::power ? std::log(static_cast<double>(n))
                                        : static_cast<double>(n));
    ys.push_back(std::log(g));
  }
  require(xs.size() >= 8, Errc::invalid_argument,
          "decay_fit: fewer than 8 eigenvalues in the fit window");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double icept = (sy - slope * sx) / m;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (icept + slope * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  fit.value = mode == FitMode::power ? slope : -slope;
  return fit;
}

enum class TipKind { essential_point_constant, nondegenerate_min, flat_min };

struct DecayBound {
  TipKind kind;
  double exponent_bound;  // eigenvalue gaps are O(j^{exponent_bound}); for
                          // nondegenerate minima this is the limiting value
  double tau_bound;       // the bound holds for every tau > tau_bound
  bool limiting;          // true when the exponent is approached, not attained
};

/// Decay-exponent predictions: -1/2 at constant-parameter tips; any -1/tau
/// with tau > 1 (approaching -1) at nondegenerate minima; -1/tau with
/// tau > (2 nu - 1)/nu for flatness order nu >= 2.
inline DecayBound predicted_decay_exponent(TipKind kind, int nu = 0) {
  switch (kind) {
    case TipKind::essential_point_constant:
      return {kind, -0.5, 2.0, false};
    case TipKind::nondegenerate_min:
      return {kind, -1.0, 1.0, true};
    case TipKind::flat_min: {
      require(nu >= 2, Errc::invalid_argument,
              "flat_min requires nu >= 2 (nu = 1 is the nondegenerate case)");
      double tau = (2.0 * nu - 1.0) / nu;
      return {kind, -1.0 / tau, tau, true};
    }
  }
  fail(Errc::invalid_argument, "predicted_decay_exponent: unknown tip kind");
}

}  // namespace npspect
