#pragma once

// 2D companion: ellipse/circle curves, the plane-strain Kelvin kernel and
// its traction, NP assembly on curves, and the ellipse gap asymptotics.
//
// kelvin2d(r) = c1 log(1/|r|) E + c2 r r^T / |r|^2 with c1 = mu', c2 = lambda'
// (the same Kupradze constants as in 3D). The pair is pinned by two
// requirements: the Lame residual vanishes away from the origin (fixes
// c2/c1 = (lambda+mu)/(lambda+3mu)) and the NP symbol eigenvalues are
// +-kappa0, equivalently  \oint_{|r|=1} T2(r_hat, r) ds = -E  (fixes the
// scale). Both are asserted in the test suite.

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "npspect/assembly.hpp"
#include "npspect/core.hpp"
#include "npspect/material.hpp"
#include "npspect/spectral.hpp"

namespace npspect {

struct Curve {
  std::function<Vec2(double)> chart;    // t in [0, 2pi)
  std::function<Vec2(double)> d_chart;  // analytic derivative
  double a = 0, b = 0;                  // semi-axes when an ellipse
  std::string descriptor;
};

inline Curve make_ellipse(double a, double b) {
  require(a > 0 && b > 0, Errc::invalid_argument, "make_ellipse: semi-axes must be positive");
  Curve c;
  c.a = a;
  c.b = b;
  c.chart = [a, b](double t) { return Vec2(a * std::cos(t), b * std::sin(t)); };
  c.d_chart = [a, b](double t) { return Vec2(-a * std::sin(t), b * std::cos(t)); };
  std::ostringstream os;
  os << "ellipse(" << a << "," << b << ")";
  c.descriptor = os.str();
  return c;
}

inline Curve make_circle(double r) { return make_ellipse(r, r); }

struct CurveGrid {
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;   // outward
  std::vector<Vec2> tangents;  // unit
  std::vector<double> weights; // arclength, trapezoid
  std::vector<double> curvature;
  std::string descriptor;
  std::uint64_t hash = 0;
  std::size_t size() const { return nodes.size(); }
  double perimeter() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

inline CurveGrid build_curve_grid(const Curve& c, int n, int index_shift = 0) {
  require(n >= 8, Errc::invalid_argument, "build_curve_grid: n >= 8");
  CurveGrid g;
  for (int i = 0; i < n; ++i) {
    double t = 2 * kPi * ((i + index_shift) % n) / n;
    Vec2 p = c.chart(t);
    Vec2 d = c.d_chart(t);
    double speed = d.norm();
    require(speed > 0, Errc::invalid_argument, "degenerate curve point");
    Vec2 tan = d / speed;
    g.nodes.push_back(p);
    g.tangents.push_back(tan);
    g.normals.push_back(Vec2(tan.y(), -tan.x()));  // outward for ccw charts
    g.weights.push_back(speed * 2 * kPi / n);
    // ellipse curvature kappa(t) = a b / |c'(t)|^3
    g.curvature.push_back(c.a * c.b / (speed * speed * speed));
  }
  std::ostringstream os;
  os << c.descriptor << "@" << n;
  if (index_shift) os << "+shift" << index_shift;
  g.descriptor = os.str();
  std::uint64_t h = hash_str(g.descriptor);
  h = fnv1a64(g.nodes.data(), g.nodes.size() * sizeof(Vec2), h);
  g.hash = h;
  return g;
}

inline Mat2 kelvin2d(const Vec2& r, const LameParams& p) {
  double rho2 = r.squaredNorm();
  require(rho2 > 0, Errc::invalid_argument, "kelvin2d: zero separation");
  KelvinConstants kc = kelvin_constants(p);
  Mat2 out = (-0.5 * kc.mu_prime * std::log(rho2)) * Mat2::Identity();  // c1 log(1/rho)
  out.noalias() += (kc.lambda_prime / rho2) * (r * r.transpose());
  return out;
}

/// T2(nu, r) = mu d' (nu r^T - r nu^T)/rho^2 - mu d' (r.nu) E /rho^2
///           - 4 mu lambda' (r.nu) r r^T / rho^4,   d' = |lambda'-mu'|.
inline Mat2 traction2d(const Vec2& nu, const Vec2& r, const LameParams& p) {
  double rho2 = r.squaredNorm();
  require(rho2 > 0, Errc::invalid_argument, "traction2d: zero separation");
  KelvinConstants kc = kelvin_constants(p);
  double rn = r.dot(nu);
  double ca = p.mu * kc.delta_prime / rho2;
  Mat2 out = ca * (nu * r.transpose() - r * nu.transpose());
  out -= (ca * rn) * Mat2::Identity();
  out.noalias() -= (4.0 * p.mu * kc.lambda_prime * rn / (rho2 * rho2)) * (r * r.transpose());
  return out;
}

namespace detail {

/// Quadrature matrix of the principal-value operator
///   f |-> p.v. (1/2) int_0^{2pi} cot((s-t_i)/2) f(s) ds
/// on the equispaced grid: exact for trigonometric polynomials below the
/// Nyquist degree (Fourier multiplier pi i sign(m), Nyquist dropped).
inline double cot_quadrature_entry(int n, double dt) {
  double acc = 0;
  for (int m = 1; m <= n / 2 - 1; ++m) acc += std::sin(m * dt);
  return -(2 * kPi / n) * acc;
}

/// Quadrature matrix of f |-> int_0^{2pi} log(1/|2 sin((s-t_i)/2)|) f(s) ds
/// on the same grid (Fourier multiplier pi/|m|, zero mean).
inline double log_quadrature_entry(int n, double dt) {
  double acc = 0;
  for (int m = 1; m <= n / 2 - 1; ++m) acc += std::cos(m * dt) / m;
  return (2 * kPi / n) * acc;
}

}  // namespace detail

/// Nystrom NP matrix on a curve, in the same symmetrized (sqrt-weight) frame
/// and with the same y - x kernel orientation as the 3D NP matrix.
///
/// Split quadrature: the kernel (including the arclength factor) is
///   M(t,s) = G * (1/2) cot((s-t)/2) + R(t,s),  G = mu d' [[0,1],[-1,0]],
/// where G collects the odd Hilbert-type leading singularity (the global
/// matrix nu t^T - t nu^T is frame-independent for an orthonormal pair) and
/// R is smooth with diagonal limit |y'(t)| (kappa/2)(mu d' E + 4 mu lambda'
/// t t^T). The cot part gets its exact band-limited quadrature matrix, the
/// remainder the plain trapezoid rule. A punctured trapezoid applied to the
/// full kernel would damp the odd multiplier linearly in the mode number and
/// sweep the high modes across (-kappa0, kappa0) instead of letting them
/// accumulate at +-kappa0.
inline OperatorMatrix assemble_np_2d(const CurveGrid& grid, const LameParams& p) {
  const std::size_t n = grid.size();
  require(n > 0, Errc::assembly, "assemble_np_2d: empty grid");
  require(n % 2 == 0, Errc::assembly, "assemble_np_2d: node count must be even");
  KelvinConstants kc = kelvin_constants(p);
  Mat2 G;
  G << 0, 1, -1, 0;
  G *= p.mu * kc.delta_prime;

  OperatorMatrix out;
  out.kind = MatrixKind::NP;
  out.dim = 2;
  out.n_nodes = n;
  out.grid_hash = grid.hash;
  std::ostringstream os;
  os << "constant(lambda=" << p.lambda << ",mu=" << p.mu << ")";
  out.field_desc = os.str();
  out.field_hash = hash_str(out.field_desc);
  out.grid_desc = grid.descriptor;
  out.scheme = "traction2d/cot-split+symw/v4";
  out.m.resize(2 * static_cast<Eigen::Index>(n), 2 * static_cast<Eigen::Index>(n));
  const double h = 2 * kPi / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double swi = std::sqrt(grid.weights[i]);
    for (std::size_t j = 0; j < n; ++j) {
      double dt = h * (static_cast<double>(i) - static_cast<double>(j));
      Mat2 blk;
      if (i == j) {
        const Vec2& t = grid.tangents[i];
        double speed = grid.weights[i] / h;
        blk = h * speed * 0.5 * grid.curvature[i] *
              (p.mu * kc.delta_prime * Mat2::Identity() +
               4.0 * p.mu * kc.lambda_prime * (t * t.transpose()));
      } else {
        double speed_j = grid.weights[j] / h;
        Mat2 M = traction2d(grid.normals[i], grid.nodes[j] - grid.nodes[i], p) * speed_j;
        Mat2 R = M - G * 0.5 / std::tan(-dt / 2);  // cot((t_j - t_i)/2)
        blk = h * R;
      }
      blk += detail::cot_quadrature_entry(static_cast<int>(n), dt) * G;
      out.m.block<2, 2>(2 * static_cast<Eigen::Index>(i), 2 * static_cast<Eigen::Index>(j)) =
          (swi / std::sqrt(grid.weights[j])) * blk;
    }
  }
  return out;
}

/// 2D single layer by the log-split quadrature: the kernel (with arclength
/// factor) is  c1 |y'(s)| log(1/|2 sin((s-t)/2)|) E + smooth remainder, the
/// log part integrated by its exact band-limited quadrature matrix and the
/// remainder by the trapezoid rule. The remainder's diagonal limit is
/// |y'(t)| (c1 log(1/|y'(t)|) E + c2 t t^T).
inline OperatorMatrix assemble_single_layer_2d(const CurveGrid& grid, const LameParams& p) {
  const std::size_t n = grid.size();
  require(n > 0, Errc::assembly, "assemble_single_layer_2d: empty grid");
  require(n % 2 == 0, Errc::assembly, "assemble_single_layer_2d: node count must be even");
  KelvinConstants kc = kelvin_constants(p);
  OperatorMatrix out;
  out.kind = MatrixKind::SingleLayer;
  out.dim = 2;
  out.n_nodes = n;
  out.grid_hash = grid.hash;
  std::ostringstream os;
  os << "constant(lambda=" << p.lambda << ",mu=" << p.mu << ")";
  out.field_desc = os.str();
  out.field_hash = hash_str(out.field_desc);
  out.grid_desc = grid.descriptor;
  out.scheme = "kelvin2d/log-split+symw/v3";
  out.m.resize(2 * static_cast<Eigen::Index>(n), 2 * static_cast<Eigen::Index>(n));
  const double h = 2 * kPi / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double swi = std::sqrt(grid.weights[i]);
    for (std::size_t j = 0; j < n; ++j) {
      double dt = h * (static_cast<double>(i) - static_cast<double>(j));
      double speed_j = grid.weights[j] / h;
      Mat2 blk;
      if (i == j) {
        const Vec2& t = grid.tangents[i];
        blk = h * speed_j *
              (kc.mu_prime * std::log(1.0 / speed_j) * Mat2::Identity() +
               kc.lambda_prime * (t * t.transpose()));
      } else {
        Mat2 M = kelvin2d(grid.nodes[i] - grid.nodes[j], p) * speed_j;
        double logk = std::log(1.0 / std::abs(2.0 * std::sin(-dt / 2)));
        blk = h * (M - kc.mu_prime * speed_j * logk * Mat2::Identity());
      }
      blk += detail::log_quadrature_entry(static_cast<int>(n), dt) * kc.mu_prime * speed_j *
             Mat2::Identity();
      out.m.block<2, 2>(2 * static_cast<Eigen::Index>(i), 2 * static_cast<Eigen::Index>(j)) =
          (swi / std::sqrt(grid.weights[j])) * blk;
    }
  }
  out.m = 0.5 * (out.m + out.m.transpose()).eval();
  return out;
}

/// The 2D essential-spectrum prediction {+-kappa0}; no point at 0 in 2D.
inline EssSpecPrediction essential_spectrum_2d(const LameParams& p) {
  double k = kappa0(p);
  EssSpecPrediction pred;
  pred.points = {-k, k};
  return pred;
}

/// The displayed ellipse gap asymptotics, verbatim:
///   gapPlus(j)  = 1/((lambda+2mu) tau) * j * ((a-b)/(a+b))^{-j}
///   gapMinus(j) = (lambda+mu)(lambda+3mu) / (4 mu^2 (lambda+2mu) tau) * j * ((a-b)/(a+b))^{-2j}
/// with tau the eccentricity. The displays carry a negative exponent that
/// grows with j while the text asserts decay; callers fitting observed rates
/// compare against |log((a-b)/(a+b))| * j and 2 |log((a-b)/(a+b))| * j
/// without relying on the sign convention.
inline std::pair<double, double> ellipse_asymptotics(int j, double a, double b,
                                                     const LameParams& p) {
  require(j >= 1, Errc::invalid_argument, "ellipse_asymptotics: j >= 1");
  require(a > b && b > 0, Errc::invalid_argument, "ellipse_asymptotics: need a > b > 0");
  const double tau = std::sqrt(a * a - b * b) / a;  // eccentricity
  const double q = (a - b) / (a + b);
  const double gap_plus = 1.0 / ((p.lambda + 2 * p.mu) * tau) * j * std::pow(q, -j);
  const double gap_minus = (p.lambda + p.mu) * (p.lambda + 3 * p.mu) /
                           (4 * p.mu * p.mu * (p.lambda + 2 * p.mu) * tau) * j *
                           std::pow(q, -2.0 * j);
  return {gap_plus, gap_minus};
}

/// Exponential-mode decay fit toward +-kappa0, both sides of the tip; only
/// eigenvalues within kappa0/2 of the tip enter, so modes converging to the
/// opposite point stay out of the sequence.
inline DecayFit decay_fit_2d(const SpectrumResult& spectrum, double tip,
                             const LameParams& p, int j_min, int j_max,
                             double exclusion_eps = 0.02) {
  return decay_fit(spectrum, tip, Side::both, FitMode::exponential, j_min, j_max,
                   essential_spectrum_2d(p), exclusion_eps, 0.5 * kappa0(p));
}

}  // namespace npspect
