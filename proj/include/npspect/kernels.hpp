#pragma once

// Pointwise Kelvin fundamental solution and its conormal (traction)
// derivative, plus the frozen-coefficient NP and double-layer kernels.
//
// Gamma(r) = (mu'/2) E / |r| + (lambda'/2) r r^T / |r|^3 is the unique
// degree -1 isotropic matrix with L Gamma = -delta E; the scale is pinned by
// the flux identity  \oint_{|r|=1} T(r_hat, r) dS = -E  (tested).
//
// The traction of the Kelvin columns, differentiated analytically in the
// target variable, is
//   T(nu, r) = (mu d'/2) (nu r^T - r nu^T) / rho^3
//            - (mu d'/2) (r.nu) E / rho^3
//            - 3 mu lambda' (r.nu) r r^T / rho^5,          d' = |lambda'-mu'|.
// The first term is the odd leading singularity; the others are O(1/rho) on
// a smooth surface since |nu.r| = O(rho^2) there.

#include <cmath>

#include "npspect/core.hpp"
#include "npspect/material.hpp"

namespace npspect {

inline Mat3 kelvin(const Vec3& r, const KelvinConstants& kc) {
  double rho2 = r.squaredNorm();
  require(rho2 > 0, Errc::invalid_argument, "kelvin: zero separation");
  double rho = std::sqrt(rho2);
  Mat3 rr = r * r.transpose();  // materialized so the output is exactly symmetric
  Mat3 out = (0.5 * kc.mu_prime / rho) * Mat3::Identity();
  out += (0.5 * kc.lambda_prime / (rho * rho2)) * rr;
  return out;
}

inline Mat3 kelvin(const Vec3& r, const LameParams& p) {
  return kelvin(r, kelvin_constants(p));
}

inline Mat3 traction(const Vec3& nu, const Vec3& r, double mu, const KelvinConstants& kc) {
  double rho2 = r.squaredNorm();
  require(rho2 > 0, Errc::invalid_argument, "traction: zero separation");
  double rho = std::sqrt(rho2);
  double inv3 = 1.0 / (rho * rho2);
  double rn = r.dot(nu);
  double ca = 0.5 * mu * kc.delta_prime * inv3;
  Mat3 out = ca * (nu * r.transpose() - r * nu.transpose());
  out -= (ca * rn) * Mat3::Identity();
  out.noalias() -= (3.0 * mu * kc.lambda_prime * rn * inv3 / rho2) * (r * r.transpose());
  return out;
}

inline Mat3 traction(const Vec3& nu, const Vec3& r, const LameParams& p) {
  return traction(nu, r, p.mu, kelvin_constants(p));
}

/// NP kernel: Kelvin traction with coefficients frozen at the target x.
/// For constant fields this is exactly the classical NP kernel.
///
/// The separation argument is y - x (equivalently, the kernel is the
/// negative of the analytic x-derivative traction). With the positive
/// Kelvin form above this orientation is what makes the single layer
/// positive AND the interior jump come out as -I/2 + K, with the rigid
/// motions at eigenvalue +1/2; both are asserted in the acceptance suite.
inline Mat3 np_kernel(const Vec3& x, const Vec3& nu_x, const Vec3& y,
                      const LameField& field) {
  require((x - y).squaredNorm() > 0, Errc::invalid_argument, "np_kernel: x == y");
  LameParams p = field(x);
  return traction(nu_x, y - x, p.mu, kelvin_constants(p));
}

/// Adjoint companion of np_kernel: np_kernel(y, nu_y, x)^T with coefficients
/// frozen at the source point y.
inline Mat3 double_layer_kernel(const Vec3& x, const Vec3& y, const Vec3& nu_y,
                                const LameField& field) {
  require((x - y).squaredNorm() > 0, Errc::invalid_argument,
          "double_layer_kernel: x == y");
  LameParams p = field(y);
  return traction(nu_y, x - y, p.mu, kelvin_constants(p)).transpose();
}

}  // namespace npspect
