#pragma once

// Parametrized closed surfaces with Gauss-Legendre x trapezoid quadrature
// grids: nodes, weights, outward unit normals, local patch radii.

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "npspect/core.hpp"

namespace npspect {

/// Gauss-Legendre nodes and weights on (-1, 1); Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  require(n >= 1, Errc::invalid_argument, "gauss_legendre: n >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p1 = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1;
      p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    double ww = 2 / ((1 - t * t) * dp * dp);
    w[i] = ww;
    w[n - 1 - i] = ww;
  }
}

enum class SurfaceKind { Sphere, Ellipsoid, Custom };

/// Chart over (theta, phi) in (0,pi) x [0,2pi) with analytic first
/// derivatives. Custom charts must supply derivatives; normals are never
/// obtained by numerical differentiation.
struct Surface {
  SurfaceKind kind = SurfaceKind::Custom;
  std::function<Vec3(double, double)> chart;
  std::function<Vec3(double, double)> d_theta;
  std::function<Vec3(double, double)> d_phi;
  // second derivatives, optional; built-ins provide them and the grid then
  // carries principal curvatures for the NP diagonal correction
  std::function<Vec3(double, double)> d2_theta_theta;
  std::function<Vec3(double, double)> d2_theta_phi;
  std::function<Vec3(double, double)> d2_phi_phi;
  int component_id = 0;
  std::string descriptor;
  double volume = 0;  // enclosed volume when known, for flux checks

  bool has_curvature() const {
    return static_cast<bool>(d2_theta_theta) && static_cast<bool>(d2_theta_phi) &&
           static_cast<bool>(d2_phi_phi);
  }
};

inline Surface make_sphere(double r, const Vec3& center = Vec3::Zero()) {
  require(r > 0, Errc::invalid_argument, "make_sphere: radius must be positive");
  Surface s;
  s.kind = SurfaceKind::Sphere;
  s.chart = [r, center](double th, double ph) {
    return Vec3(center.x() + r * std::sin(th) * std::cos(ph),
                center.y() + r * std::sin(th) * std::sin(ph),
                center.z() + r * std::cos(th));
  };
  s.d_theta = [r](double th, double ph) {
    return Vec3(r * std::cos(th) * std::cos(ph), r * std::cos(th) * std::sin(ph),
                -r * std::sin(th));
  };
  s.d_phi = [r](double th, double ph) {
    return Vec3(-r * std::sin(th) * std::sin(ph), r * std::sin(th) * std::cos(ph), 0.0);
  };
  s.d2_theta_theta = [r](double th, double ph) {
    return Vec3(-r * std::sin(th) * std::cos(ph), -r * std::sin(th) * std::sin(ph),
                -r * std::cos(th));
  };
  s.d2_theta_phi = [r](double th, double ph) {
    return Vec3(-r * std::cos(th) * std::sin(ph), r * std::cos(th) * std::cos(ph), 0.0);
  };
  s.d2_phi_phi = [r](double th, double ph) {
    return Vec3(-r * std::sin(th) * std::cos(ph), -r * std::sin(th) * std::sin(ph), 0.0);
  };
  s.volume = 4.0 / 3.0 * kPi * r * r * r;
  std::ostringstream os;
  os << "sphere(r=" << r;
  if (center.norm() > 0) os << ",c=(" << center.x() << "," << center.y() << "," << center.z() << ")";
  os << ")";
  s.descriptor = os.str();
  return s;
}

inline Surface make_ellipsoid(double a, double b, double c) {
  require(a > 0 && b > 0 && c > 0, Errc::invalid_argument,
          "make_ellipsoid: semi-axes must be positive");
  Surface s;
  s.kind = SurfaceKind::Ellipsoid;
  s.chart = [a, b, c](double th, double ph) {
    return Vec3(a * std::sin(th) * std::cos(ph), b * std::sin(th) * std::sin(ph),
                c * std::cos(th));
  };
  s.d_theta = [a, b, c](double th, double ph) {
    return Vec3(a * std::cos(th) * std::cos(ph), b * std::cos(th) * std::sin(ph),
                -c * std::sin(th));
  };
  s.d_phi = [a, b](double th, double ph) {
    return Vec3(-a * std::sin(th) * std::sin(ph), b * std::sin(th) * std::cos(ph), 0.0);
  };
  s.d2_theta_theta = [a, b, c](double th, double ph) {
    return Vec3(-a * std::sin(th) * std::cos(ph), -b * std::sin(th) * std::sin(ph),
                -c * std::cos(th));
  };
  s.d2_theta_phi = [a, b](double th, double ph) {
    return Vec3(-a * std::cos(th) * std::sin(ph), b * std::cos(th) * std::cos(ph), 0.0);
  };
  s.d2_phi_phi = [a, b](double th, double ph) {
    return Vec3(-a * std::sin(th) * std::cos(ph), -b * std::sin(th) * std::sin(ph), 0.0);
  };
  s.volume = 4.0 / 3.0 * kPi * a * b * c;
  std::ostringstream os;
  os << "ellipsoid(" << a << "," << b << "," << c << ")";
  s.descriptor = os.str();
  return s;
}

struct QuadratureGrid {
  std::vector<Vec3> nodes;
  std::vector<Vec3> normals;
  std::vector<double> weights;
  std::vector<double> patch_radius;  // sqrt(w/pi), effective local disk radius
  std::vector<int> component;
  // parameter-cell footprint of each node, (u0, u1, phi0, phi1) with u = cos(theta),
  // and the owning surface; used for near-field requadrature during assembly
  std::vector<std::array<double, 4>> cells;
  std::vector<int> surface_index;
  std::vector<Surface> surfaces;
  // principal-curvature data for the NP diagonal correction (zero when the
  // surface supplies no second derivatives)
  bool has_curvature = false;
  std::vector<double> mean_curvature;
  std::vector<Mat3> curvature_tensor;  // (1/4)[(3k1+k2) e1 e1^T + (k1+3k2) e2 e2^T]
  int n_theta = 0, n_phi = 0;
  double volume = 0;  // summed over components
  std::string descriptor;
  std::uint64_t hash = 0;

  std::size_t size() const { return nodes.size(); }
  double area() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
  double flux() const {
    double s = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * normals[i].dot(nodes[i]);
    return s;
  }
};

namespace detail {

inline void append_surface_grid(QuadratureGrid& g, const Surface& s, int n_theta, int n_phi) {
  std::vector<double> gx, gw;
  gauss_legendre(n_theta, gx, gw);
  const int si = static_cast<int>(g.surfaces.size());
  g.surfaces.push_back(s);
  for (int it = 0; it < n_theta; ++it) {
    double th = std::acos(gx[it]);
    double sin_th = std::sin(th);
    // u-cell edges at midpoints between Gauss nodes, closed at the poles
    double u0 = it == 0 ? -1.0 : 0.5 * (gx[it - 1] + gx[it]);
    double u1 = it == n_theta - 1 ? 1.0 : 0.5 * (gx[it] + gx[it + 1]);
    for (int ip = 0; ip < n_phi; ++ip) {
      double ph = 2 * kPi * ip / n_phi;
      Vec3 p = s.chart(th, ph);
      Vec3 cr = s.d_theta(th, ph).cross(s.d_phi(th, ph));
      double jac = cr.norm();
      require(jac > 0, Errc::invalid_argument, "degenerate chart point");
      // dA = |p_theta x p_phi| dtheta dphi = (|...|/sin theta) du dphi, u = cos theta
      double w = gw[it] * (2 * kPi / n_phi) * jac / sin_th;
      g.nodes.push_back(p);
      g.normals.push_back(cr / jac);
      g.weights.push_back(w);
      g.patch_radius.push_back(std::sqrt(w / kPi));
      g.component.push_back(s.component_id);
      g.cells.push_back({u0, u1, ph - kPi / n_phi, ph + kPi / n_phi});
      g.surface_index.push_back(si);

      if (s.has_curvature()) {
        // curvature form c(t) = -(nu . p_ab) t^a t^b against the metric
        // [p_a . p_b]; on a sphere of radius R both principal values are 1/R
        const Vec3 nu = cr / jac;
        Vec3 pt = s.d_theta(th, ph), pp = s.d_phi(th, ph);
        Mat2 A, G;
        A << -nu.dot(s.d2_theta_theta(th, ph)), -nu.dot(s.d2_theta_phi(th, ph)),
            -nu.dot(s.d2_theta_phi(th, ph)), -nu.dot(s.d2_phi_phi(th, ph));
        G << pt.dot(pt), pt.dot(pp), pt.dot(pp), pp.dot(pp);
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat2> es(A, G);
        double k1 = es.eigenvalues()(0), k2 = es.eigenvalues()(1);
        Vec3 e1 = (es.eigenvectors()(0, 0) * pt + es.eigenvectors()(1, 0) * pp).normalized();
        Vec3 e2 = nu.cross(e1);
        g.mean_curvature.push_back(0.5 * (k1 + k2));
        g.curvature_tensor.push_back(0.25 * ((3 * k1 + k2) * (e1 * e1.transpose()) +
                                             (k1 + 3 * k2) * (e2 * e2.transpose())));
      } else {
        g.mean_curvature.push_back(0.0);
        g.curvature_tensor.push_back(Mat3::Zero());
      }
    }
  }
  g.volume += s.volume;
}

}  // namespace detail

inline QuadratureGrid build_grid(const std::vector<Surface>& components, int n_theta,
                                 int n_phi) {
  require(n_theta >= 4 && n_phi >= 4, Errc::invalid_argument,
          "build_grid: need n_theta >= 4 and n_phi >= 4");
  require(!components.empty(), Errc::invalid_argument, "build_grid: no surfaces");
  QuadratureGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.has_curvature = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < components.size(); ++k) {
    g.has_curvature = g.has_curvature && components[k].has_curvature();
    detail::append_surface_grid(g, components[k], n_theta, n_phi);
    if (k) os << "+";
    os << components[k].descriptor;
  }
  os << "@" << n_theta << "x" << n_phi;
  g.descriptor = os.str();

  std::uint64_t h = hash_str(g.descriptor);
  h = fnv1a64(g.nodes.data(), g.nodes.size() * sizeof(Vec3), h);
  h = fnv1a64(g.weights.data(), g.weights.size() * sizeof(double), h);
  g.hash = h;
  return g;
}

inline QuadratureGrid build_grid(const Surface& s, int n_theta, int n_phi) {
  return build_grid(std::vector<Surface>{s}, n_theta, n_phi);
}

/// Dense per-component point samples, for essential-spectrum prediction.
inline std::vector<std::vector<Vec3>> sample_components(const std::vector<Surface>& comps,
                                                        int n_theta = 48, int n_phi = 96) {
  std::vector<std::vector<Vec3>> out;
  for (const auto& s : comps) {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int it = 0; it < n_theta; ++it) {
      double th = kPi * (it + 0.5) / n_theta;
      for (int ip = 0; ip < n_phi; ++ip)
        pts.push_back(s.chart(th, 2 * kPi * ip / n_phi));
    }
    out.push_back(std::move(pts));
  }
  return out;
}

/// CSV export (x,y,z,nx,ny,nz,w) for external visualization.
inline void write_grid_csv(const QuadratureGrid& g, std::ostream& os) {
  os << "x,y,z,nx,ny,nz,w\n";
  os.precision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3& p = g.nodes[i];
    const Vec3& n = g.normals[i];
    os << p.x() << ',' << p.y() << ',' << p.z() << ',' << n.x() << ',' << n.y() << ','
       << n.z() << ',' << g.weights[i] << '\n';
  }
}

}  // namespace npspect
