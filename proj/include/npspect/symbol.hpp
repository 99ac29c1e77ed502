#pragma once

// Principal symbols of the Lame operator, the single-layer operator, and the
// NP operator, with both closed forms and numeric line-integral oracles.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "npspect/core.hpp"
#include "npspect/material.hpp"

namespace npspect {

/// Lambda(xi) = xi xi^T / |xi|^2, the projector onto span(xi).
inline Mat3 xi_projector(const Vec3& xi) {
  double n2 = xi.squaredNorm();
  require(n2 > 0, Errc::invalid_argument, "xi_projector: xi = 0");
  return (xi * xi.transpose()) / n2;
}

/// ell(xi) = -|xi|^2 (mu E + (lambda+mu) Lambda(xi)).
inline Mat3 lame_symbol(const Vec3& xi, const LameParams& p) {
  double n2 = xi.squaredNorm();
  require(n2 > 0, Errc::invalid_argument, "lame_symbol: xi = 0");
  return -n2 * (p.mu * Mat3::Identity() + (p.lambda + p.mu) * xi_projector(xi));
}

/// ell^{-1}(xi) = -(1 / (mu |xi|^2)) (E - (lambda+mu)/(lambda+2mu) Lambda(xi)).
inline Mat3 lame_symbol_inverse(const Vec3& xi, const LameParams& p) {
  double n2 = xi.squaredNorm();
  require(n2 > 0, Errc::invalid_argument, "lame_symbol_inverse: xi = 0");
  auto v = validate_convexity(p, 3);
  require(v.ok, Errc::invalid_argument, "lame_symbol_inverse: " + v.reason);
  double c = (p.lambda + p.mu) / (p.lambda + 2 * p.mu);
  return -(1.0 / (p.mu * n2)) * (Mat3::Identity() - c * xi_projector(xi));
}

namespace detail {

/// Matrix-valued adaptive Simpson on [a, b] with Frobenius-norm tolerance.
template <class F>
Mat3 adaptive_simpson(const F& f, double a, double b, double tol, int depth,
                      const Mat3& fa, const Mat3& fm, const Mat3& fb,
                      const Mat3& whole) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  Mat3 flm = f(lm), frm = f(rm);
  Mat3 left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  Mat3 right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  Mat3 err = left + right - whole;
  if (depth <= 0 || err.norm() < 15 * tol) return left + right + err / 15.0;
  return adaptive_simpson(f, a, m, tol / 2, depth - 1, fa, flm, fm, left) +
         adaptive_simpson(f, m, b, tol / 2, depth - 1, fm, frm, fb, right);
}

template <class F>
Mat3 integrate_line(const F& f, double a, double b, double tol) {
  Mat3 fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  Mat3 whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, tol, 48, fa, fm, fb, whole);
}

inline double scalar_line_integral(const std::function<double(double)>& f, double a,
                                   double b, double tol) {
  auto g = [&](double t) { return Mat3(f(t) * Mat3::Identity()); };
  return integrate_line(g, a, b, tol)(0, 0);
}

}  // namespace detail

/// The three scalar xi3-integrals at |xi'| = s, computed by truncated
/// adaptive quadrature with the O(1/T) (resp. O(1/T^3)) tail estimate.
/// Exact values: pi/s, pi/(2s), pi/(2 s^3).
struct LineIntegrals {
  double inv_xi2;      // int |xi|^-2 dxi3
  double xi32_xi4;     // int xi3^2 |xi|^-4 dxi3
  double inv_xi4;      // int |xi|^-4 dxi3
};

inline LineIntegrals np_line_integrals(double s, double tol = 1e-10) {
  require(s > 0, Errc::invalid_argument, "np_line_integrals: |xi'| > 0");
  double T = 1e4 * s;
  auto i1f = [s](double t) { return 1.0 / (s * s + t * t); };
  auto i2f = [s](double t) {
    double q = s * s + t * t;
    return t * t / (q * q);
  };
  auto i3f = [s](double t) {
    double q = s * s + t * t;
    return 1.0 / (q * q);
  };
  LineIntegrals out;
  out.inv_xi2 = detail::scalar_line_integral(i1f, -T, T, tol) + 2.0 / T;
  out.xi32_xi4 = detail::scalar_line_integral(i2f, -T, T, tol) + 2.0 / T;
  out.inv_xi4 = detail::scalar_line_integral(i3f, -T, T, tol) + 2.0 / (3.0 * T * T * T);
  return out;
}

enum class SymbolMode { closed_form, numeric_line_integral };

/// Principal symbol of the single-layer operator at a flat frame point:
///   sigma_A(xi') = (1 / (2 mu |xi'|)) (E - (c/2) (Lambda2(xi') + e3 e3^T)),
/// with c = (lambda+mu)/(lambda+2mu) and Lambda2 the in-plane projector onto
/// xi'. This is (1/2pi) int Gamma_hat(xi', xi3) dxi3 for Gamma_hat = -ell^{-1}
/// (the Fourier transform of the Kelvin matrix, L Gamma = -delta E); the
/// closed form was resolved against the numeric integral, which is the
/// ground truth here.
inline Mat3 single_layer_symbol(const Vec2& xip, const LameParams& p,
                                SymbolMode mode = SymbolMode::closed_form) {
  double s2 = xip.squaredNorm();
  require(s2 > 0, Errc::invalid_argument, "single_layer_symbol: xi' = 0");
  double s = std::sqrt(s2);
  if (mode == SymbolMode::closed_form) {
    double c = (p.lambda + p.mu) / (p.lambda + 2 * p.mu);
    Mat3 P = Mat3::Zero();
    P.topLeftCorner<2, 2>() = (xip * xip.transpose()) / s2;
    P(2, 2) = 1.0;
    return (1.0 / (2 * p.mu * s)) * (Mat3::Identity() - 0.5 * c * P);
  }
  double T = 1e4 * s;
  auto f = [&](double t) {
    return Mat3(-lame_symbol_inverse(Vec3(xip.x(), xip.y(), t), p));
  };
  Mat3 val = detail::integrate_line(f, -T, T, 1e-11);
  // integrand -> (1/(mu t^2)) (E - c e3 e3^T) as |t| -> inf
  double c = (p.lambda + p.mu) / (p.lambda + 2 * p.mu);
  Mat3 tail = (2.0 / (p.mu * T)) * Mat3::Identity();
  tail(2, 2) -= 2.0 * c / (p.mu * T);
  return (val + tail) / (2 * kPi);
}

/// Principal symbol of the NP operator:
///   sigma_B(xi') = (kappa0 i / |xi'|) [[0,0,-xi1],[0,0,-xi2],[xi1,xi2,0]],
/// using pi mu |lambda'-mu'| = kappa0. Hermitian; eigenvalues {0, +-kappa0}.
inline Mat3c np_symbol(const Vec2& xip, const LameParams& p) {
  double s = xip.norm();
  require(s > 0, Errc::invalid_argument, "np_symbol: xi' = 0");
  double k = kappa0(p);
  Mat3 M = Mat3::Zero();
  M(0, 2) = -xip.x();
  M(1, 2) = -xip.y();
  M(2, 0) = xip.x();
  M(2, 1) = xip.y();
  return (std::complex<double>(0, 1) * k / s) * M.cast<std::complex<double>>();
}

inline Mat3c np_symbol_at(const Vec3& x, const Vec2& xip, const LameField& field) {
  return np_symbol(xip, field(x));
}

/// kappa0(x)^{-1} sigma_B: eigenvalues {0, +-1} for every point and frequency.
inline Mat3c np_symbol_modified(const Vec3& x, const Vec2& xip, const LameField& field) {
  return np_symbol(xip, field(x)) / kappa0(field(x));
}

inline std::vector<double> hermitian_eigenvalues(const Mat3c& m) {
  Eigen::SelfAdjointEigenSolver<Mat3c> es(m);
  require(es.info() == Eigen::Success, Errc::eigensolve, "3x3 hermitian eigensolve failed");
  return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
}

/// Eigenvalue branches of sigma_B over sampled (x, xi'), aggregated into the
/// same point/interval structure as material::predict_essential_spectrum.
inline EssSpecPrediction symbol_essential_spectrum(
    const LameField& field, const std::vector<std::vector<Vec3>>& component_samples,
    int n_directions = 4, double degeneracy_rel_tol = 1e-9) {
  require(!component_samples.empty(), Errc::invalid_argument,
          "symbol_essential_spectrum: empty sample set");
  EssSpecPrediction out;
  out.points.push_back(0.0);
  std::vector<double> pos_points;
  std::vector<Interval> pos_intervals;
  for (const auto& comp : component_samples) {
    require(!comp.empty(), Errc::invalid_argument, "empty component sample");
    double kmin = 1e300, kmax = -1e300, ksum = 0;
    for (const auto& x : comp) {
      double kx = 0;
      for (int id = 0; id < n_directions; ++id) {
        double a = kPi * id / n_directions;
        auto ev = hermitian_eigenvalues(np_symbol_at(x, Vec2(std::cos(a), std::sin(a)), field));
        for (double e : ev) kx = std::max(kx, std::abs(e));
      }
      kmin = std::min(kmin, kx);
      kmax = std::max(kmax, kx);
      ksum += kx;
    }
    double kmean = ksum / static_cast<double>(comp.size());
    if (kmax - kmin < degeneracy_rel_tol * kmean)
      pos_points.push_back(kmean);
    else
      pos_intervals.push_back({kmin, kmax});
  }
  std::sort(pos_points.begin(), pos_points.end());
  pos_points.erase(std::unique(pos_points.begin(), pos_points.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                   pos_points.end());
  for (double p : pos_points) {
    out.points.push_back(p);
    out.points.push_back(-p);
  }
  std::sort(pos_intervals.begin(), pos_intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : pos_intervals) {
    out.intervals.push_back(iv);
    out.intervals.push_back({-iv.hi, -iv.lo});
  }
  std::sort(out.points.begin(), out.points.end());
  std::sort(out.intervals.begin(), out.intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return out;
}

/// Hausdorff distance between two predictions, as point sets on the line
/// (intervals contribute their endpoints and interiors).
inline double prediction_hausdorff(const EssSpecPrediction& a, const EssSpecPrediction& b) {
  auto one_sided = [](const EssSpecPrediction& from, const EssSpecPrediction& to) {
    double worst = 0;
    for (double p : from.points) worst = std::max(worst, to.distance(p));
    for (const auto& iv : from.intervals) {
      const int n = 64;
      for (int i = 0; i <= n; ++i) {
        double x = iv.lo + (iv.hi - iv.lo) * i / n;
        worst = std::max(worst, to.distance(x));
      }
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace npspect
