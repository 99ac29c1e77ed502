#pragma once

// Dense Nystrom assembly of the single-layer, NP, symmetrized, and modified
// NP matrices, plus the binary matrix cache.
//
// Matrices are stored in the symmetrized Nystrom frame: block (i,j) is
// sqrt(w_i) kernel(x_i, x_j) sqrt(w_j), the representation of the quadrature
// operator in the L2(dS)-orthonormal nodal basis. This is a similarity of
// the plain w_j-weighted Nystrom matrix, so spectra are unchanged, and it is
// the frame in which the single layer is genuinely symmetric and the Plemelj
// identity S K = K^T S holds up to quadrature error only.
//
// Singular corrections:
//  - single layer diagonal: exact polar integration of the Kelvin leading
//    term over the tangent disk of radius r_i = sqrt(w_i/pi),
//        D_i = pi r_i (mu' E + (lambda'/2)(E - nu nu^T));
//  - NP diagonal, sphere components: row-sum subtraction against the exact
//    own-component integral. On a sphere (any radius) with coefficients
//    frozen at x the principal value over the whole component is
//      M_K = (kappa0 + 2 pi mu lambda') E :
//    the odd part cancels exactly, nu.(y-x) = -rho^2/(2R), int dS/rho = 4 pi R,
//    int r r^T/rho^3 dS = (4 pi R/3) E. The diagonal block is M_K minus the
//    same-component off-diagonal row sum, which makes constant densities
//    exact (translations sit at 1/2 exactly).
//  - NP diagonal, other smooth components with curvature data: the
//    closed-form disk integral of the smooth kernel remainder
//      D_i = pi r_i [ (mu d' H_i / 2) E + (3 mu lambda' / 2) Q_i ],
//    with H the mean curvature and Q = (1/4)[(3k1+k2) e1 e1^T +
//    (k1+3k2) e2 e2^T]. Without curvature data the diagonal falls back to
//    zero and the scheme is first order in mesh size.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "npspect/core.hpp"
#include "npspect/eigensolve.hpp"
#include "npspect/geometry.hpp"
#include "npspect/kernels.hpp"
#include "npspect/material.hpp"

namespace npspect {

enum class MatrixKind : std::uint32_t {
  SingleLayer = 1,
  NP = 2,
  SymmetrizedNP = 3,
  ModifiedNP = 4,
};

inline const char* to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::SingleLayer: return "single_layer";
    case MatrixKind::NP: return "np";
    case MatrixKind::SymmetrizedNP: return "symmetrized_np";
    case MatrixKind::ModifiedNP: return "modified_np";
  }
  return "?";
}

struct OperatorMatrix {
  Eigen::MatrixXd m;
  MatrixKind kind = MatrixKind::SingleLayer;
  int dim = 3;  // ambient dimension d; blocks are d x d
  std::size_t n_nodes = 0;
  std::uint64_t grid_hash = 0;
  std::uint64_t field_hash = 0;
  std::string grid_desc, field_desc, scheme;
  int clip_count = 0;

  std::uint64_t build_hash() const {
    std::uint64_t h = hash_str(std::string(to_string(kind)));
    h = fnv1a64(&grid_hash, sizeof grid_hash, h);
    h = fnv1a64(&field_hash, sizeof field_hash, h);
    h = hash_str(scheme, h);
    return h;
  }
};

namespace detail {

/// Integral of the Kelvin kernel (with constants frozen at the target) over
/// node j's parameter cell, by an 8x8 Gauss product rule. The plain Nystrom
/// weight w_j * Gamma(x_i - x_j) overshoots for node pairs a few patch radii
/// apart (worst at the pole rings, where it drives the assembled single
/// layer indefinite); re-integrating the near cells restores positivity.
struct CellRule {
  std::vector<double> x, w;
  CellRule() { gauss_legendre(8, x, w); }
};
inline const CellRule& cell_rule() {
  static const CellRule r;  // magic-static init is thread safe
  return r;
}

inline Mat3 kelvin_cell_integral(const QuadratureGrid& grid, std::size_t j, const Vec3& xi,
                                 const KelvinConstants& kc) {
  const auto& gx = cell_rule().x;
  const auto& gw = cell_rule().w;
  const auto& c = grid.cells[j];
  const Surface& s = grid.surfaces[static_cast<std::size_t>(grid.surface_index[j])];
  const double du = 0.5 * (c[1] - c[0]), mu_ = 0.5 * (c[1] + c[0]);
  const double dp = 0.5 * (c[3] - c[2]), mp = 0.5 * (c[3] + c[2]);
  Mat3 acc = Mat3::Zero();
  for (std::size_t a = 0; a < gx.size(); ++a) {
    double u = mu_ + du * gx[a];
    double th = std::acos(std::min(1.0, std::max(-1.0, u)));
    double sin_th = std::sin(th);
    for (std::size_t b = 0; b < gx.size(); ++b) {
      double ph = mp + dp * gx[b];
      Vec3 y = s.chart(th, ph);
      double jac = s.d_theta(th, ph).cross(s.d_phi(th, ph)).norm() / sin_th;
      acc.noalias() += (gw[a] * gw[b] * jac) * kelvin(xi - y, kc);
    }
  }
  return (du * dp) * acc;
}

/// Near-field companion for the NP matrix: integral of the (regular, since
/// x_i is outside cell_j) NP kernel over node j's parameter cell.
inline Mat3 np_cell_integral(const QuadratureGrid& grid, std::size_t j, const Vec3& xi,
                             const Vec3& nu_i, double mu, const KelvinConstants& kc) {
  const auto& gx = cell_rule().x;
  const auto& gw = cell_rule().w;
  const auto& c = grid.cells[j];
  const Surface& s = grid.surfaces[static_cast<std::size_t>(grid.surface_index[j])];
  const double du = 0.5 * (c[1] - c[0]), mu_ = 0.5 * (c[1] + c[0]);
  const double dp = 0.5 * (c[3] - c[2]), mp = 0.5 * (c[3] + c[2]);
  Mat3 acc = Mat3::Zero();
  for (std::size_t a = 0; a < gx.size(); ++a) {
    double u = mu_ + du * gx[a];
    double th = std::acos(std::min(1.0, std::max(-1.0, u)));
    double sin_th = std::sin(th);
    for (std::size_t b = 0; b < gx.size(); ++b) {
      double ph = mp + dp * gx[b];
      Vec3 y = s.chart(th, ph);
      double jac = s.d_theta(th, ph).cross(s.d_phi(th, ph)).norm() / sin_th;
      acc.noalias() += (gw[a] * gw[b] * jac) * traction(nu_i, y - xi, mu, kc);
    }
  }
  return (du * dp) * acc;
}

/// Runs run_range(begin, end) over a contiguous partition of [0, n). Each
/// worker owns disjoint rows and there are no reductions, so results are
/// bit-identical for any worker count.
template <class F>
void parallel_rows(std::size_t n, int workers, const F& run_range) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t nw = workers > 0 ? static_cast<std::size_t>(workers) : (hw ? hw : 1);
  nw = std::min(nw, n ? n : std::size_t{1});
  if (nw <= 1) {
    run_range(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + nw - 1) / nw;
  for (std::size_t k = 0; k < nw; ++k) {
    std::size_t b = k * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] { run_range(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

inline OperatorMatrix assemble_single_layer(const QuadratureGrid& grid,
                                            const LameField& field, int workers = 0) {
  const std::size_t n = grid.size();
  require(n > 0, Errc::assembly, "assemble_single_layer: empty grid");
  OperatorMatrix out;
  out.kind = MatrixKind::SingleLayer;
  out.dim = 3;
  out.n_nodes = n;
  out.grid_hash = grid.hash;
  out.field_hash = field.hash();
  out.grid_desc = grid.descriptor;
  out.field_desc = field.descriptor;
  out.scheme = "kelvin/disk-diag+nearcell+symw/v5";
  out.m.resize(3 * n, 3 * n);

  detail::parallel_rows(n, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      LameParams pi = field(grid.nodes[i]);
      KelvinConstants kc = kelvin_constants(pi);
      const double swi = std::sqrt(grid.weights[i]);
      for (std::size_t j = 0; j < n; ++j) {
        Mat3 blk;
        if (i == j) {
          double r = grid.patch_radius[i];
          const Vec3& nu = grid.normals[i];
          blk = kPi * r *
                (kc.mu_prime * Mat3::Identity() +
                 0.5 * kc.lambda_prime * (Mat3::Identity() - nu * nu.transpose()));
        } else {
          double rho = (grid.nodes[i] - grid.nodes[j]).norm();
          if (rho < 2.0 * (grid.patch_radius[i] + grid.patch_radius[j]))
            blk = detail::kelvin_cell_integral(grid, j, grid.nodes[i], kc) *
                  (swi / std::sqrt(grid.weights[j]));
          else
            blk = (swi * std::sqrt(grid.weights[j])) *
                  kelvin(grid.nodes[i] - grid.nodes[j], kc);
        }
        out.m.block<3, 3>(3 * static_cast<Eigen::Index>(i), 3 * static_cast<Eigen::Index>(j)) = blk;
      }
    }
  });
  // exactly symmetric for constant fields; frozen-at-target coefficients
  // break it at quadrature level for variable ones
  out.m = 0.5 * (out.m + out.m.transpose()).eval();
  return out;
}

inline OperatorMatrix assemble_np(const QuadratureGrid& grid, const LameField& field,
                                  int workers = 0) {
  const std::size_t n = grid.size();
  require(n > 0, Errc::assembly, "assemble_np: empty grid");
  OperatorMatrix out;
  out.kind = MatrixKind::NP;
  out.dim = 3;
  out.n_nodes = n;
  out.grid_hash = grid.hash;
  out.field_hash = field.hash();
  out.grid_desc = grid.descriptor;
  out.field_desc = field.descriptor;
  bool all_spheres = true;
  for (const auto& s : grid.surfaces) all_spheres = all_spheres && s.kind == SurfaceKind::Sphere;
  out.scheme = all_spheres            ? "traction/rowsum-diag+nearcell+symw/v5"
               : grid.has_curvature   ? "traction/curv-diag+nearcell+symw/v5"
                                      : "traction/zero-diag+nearcell+symw/v5";
  out.m.resize(3 * n, 3 * n);

  detail::parallel_rows(n, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      LameParams pi = field(grid.nodes[i]);
      KelvinConstants kc = kelvin_constants(pi);
      const double swi = std::sqrt(grid.weights[i]);
      Mat3 row_sum = Mat3::Zero();  // in operator scaling, i.e. block / sqrt(w_i/w_j)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        Mat3 blk;  // operator block: int over cell_j of the kernel
        double rho = (grid.nodes[i] - grid.nodes[j]).norm();
        if (rho < 2.0 * (grid.patch_radius[i] + grid.patch_radius[j]))
          blk = detail::np_cell_integral(grid, j, grid.nodes[i], grid.normals[i], pi.mu, kc);
        else
          blk = grid.weights[j] *
                traction(grid.normals[i], grid.nodes[j] - grid.nodes[i], pi.mu, kc);
        if (grid.component[j] == grid.component[i]) row_sum += blk;
        out.m.block<3, 3>(3 * static_cast<Eigen::Index>(i), 3 * static_cast<Eigen::Index>(j)) =
            (swi / std::sqrt(grid.weights[j])) * blk;
      }
      Mat3 diag;
      const Surface& si = grid.surfaces[static_cast<std::size_t>(grid.surface_index[i])];
      if (si.kind == SurfaceKind::Sphere) {
        double m_k = kappa0(pi) + 2 * kPi * pi.mu * kc.lambda_prime;
        diag = m_k * Mat3::Identity() - row_sum;
      } else if (grid.has_curvature) {
        double r = grid.patch_radius[i];
        diag = kPi * r *
               (0.5 * pi.mu * kc.delta_prime * grid.mean_curvature[i] * Mat3::Identity() +
                1.5 * pi.mu * kc.lambda_prime * grid.curvature_tensor[i]);
      } else {
        diag = Mat3::Zero();
      }
      out.m.block<3, 3>(3 * static_cast<Eigen::Index>(i), 3 * static_cast<Eigen::Index>(i)) = diag;
    }
  });
  return out;
}

/// Plemelj symmetrization K_c = S^{1/2} K S^{-1/2}, with S eigenvalues below
/// eps_clip = 1e-12 * lambda_max(S) clipped up to eps_clip (quadrature noise;
/// S is positive in the continuum). Hard error if more than 1% get clipped.
inline OperatorMatrix symmetrize(const OperatorMatrix& K, const OperatorMatrix& S) {
  require(K.kind == MatrixKind::NP, Errc::assembly, "symmetrize: K must be the NP matrix");
  require(S.kind == MatrixKind::SingleLayer, Errc::assembly,
          "symmetrize: S must be the single-layer matrix");
  require(K.grid_hash == S.grid_hash && K.field_hash == S.field_hash, Errc::assembly,
          "symmetrize: grid/field mismatch between K and S");
  require(K.m.rows() == S.m.rows(), Errc::assembly, "symmetrize: size mismatch");

  Eigen::VectorXd w;
  Eigen::MatrixXd V;
  sym_eigendecomp(S.m, w, V);
  const double eps_clip = 1e-12 * w(w.size() - 1);
  int clipped = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) < eps_clip) {
      w(i) = eps_clip;
      ++clipped;
    }
  require(clipped <= static_cast<int>(0.01 * static_cast<double>(w.size())), Errc::assembly,
          "symmetrize: assembly too coarse, clipped " + std::to_string(clipped) + " of " +
              std::to_string(w.size()) + " single-layer eigenvalues");

  Eigen::VectorXd sq = w.array().sqrt();
  Eigen::MatrixXd Shalf = gemm(V * sq.asDiagonal(), V.transpose());
  Eigen::MatrixXd Sinvhalf = gemm(V * sq.cwiseInverse().asDiagonal(), V.transpose());
  Eigen::MatrixXd M = gemm(gemm(Shalf, K.m), Sinvhalf);

  OperatorMatrix out;
  out.kind = MatrixKind::SymmetrizedNP;
  out.dim = K.dim;
  out.n_nodes = K.n_nodes;
  out.grid_hash = K.grid_hash;
  out.field_hash = K.field_hash;
  out.grid_desc = K.grid_desc;
  out.field_desc = K.field_desc;
  out.scheme = K.scheme + "+plemelj/v1";
  out.clip_count = clipped;
  out.m = 0.5 * (M + M.transpose()).eval();
  return out;
}

/// Modified NP matrix: left-multiplies K blockwise by diag(1/kappa0(x_i)).
inline OperatorMatrix modified_np(const OperatorMatrix& K, const QuadratureGrid& grid,
                                  const LameField& field) {
  require(K.kind == MatrixKind::NP, Errc::assembly, "modified_np: K must be the NP matrix");
  require(K.grid_hash == grid.hash, Errc::assembly, "modified_np: grid mismatch");
  require(K.n_nodes == grid.size(), Errc::assembly, "modified_np: node count mismatch");
  const int d = K.dim;
  OperatorMatrix out = K;
  out.kind = MatrixKind::ModifiedNP;
  out.scheme = K.scheme + "+kappa-inv/v1";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double k = kappa0(field(grid.nodes[i]));
    out.m.middleRows(static_cast<Eigen::Index>(d * i), d) /= k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix cache. Wire format, little endian:
//   "NPSM" | u32 version | u32 kind | u32 d | u64 N | u64 grid hash |
//   row-major float64 payload | u64 FNV-1a checksum of the payload bytes.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kCacheVersion = 1;

inline void cache_store(const OperatorMatrix& om, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), Errc::io, "cache_store: cannot open " + path);
  f.write("NPSM", 4);
  auto put32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto put64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  put32(kCacheVersion);
  put32(static_cast<std::uint32_t>(om.kind));
  put32(static_cast<std::uint32_t>(om.dim));
  put64(om.n_nodes);
  put64(om.grid_hash);
  const Eigen::Index rows = om.m.rows(), cols = om.m.cols();
  std::vector<double> row(static_cast<std::size_t>(cols));
  std::uint64_t checksum = 1469598103934665603ull;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) row[static_cast<std::size_t>(j)] = om.m(i, j);
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    checksum = fnv1a64(row.data(), row.size() * sizeof(double), checksum);
  }
  put64(checksum);
  require(f.good(), Errc::io, "cache_store: write failed for " + path);
}

inline OperatorMatrix cache_load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), Errc::io, "cache_load: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  require(f.gcount() == 4 && std::memcmp(magic, "NPSM", 4) == 0, Errc::bad_format,
          "cache_load: bad magic in " + path);
  auto get32 = [&]() {
    std::uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    require(f.gcount() == 4, Errc::bad_format, "cache_load: truncated header");
    return v;
  };
  auto get64 = [&]() {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 8);
    require(f.gcount() == 8, Errc::bad_format, "cache_load: truncated header");
    return v;
  };
  std::uint32_t version = get32();
  require(version == kCacheVersion, Errc::bad_format,
          "cache_load: unsupported version " + std::to_string(version));
  std::uint32_t kind = get32();
  require(kind >= 1 && kind <= 4, Errc::bad_format, "cache_load: unknown matrix kind");
  std::uint32_t d = get32();
  require(d == 2 || d == 3, Errc::bad_format, "cache_load: bad dimension");
  std::uint64_t n_nodes = get64();
  std::uint64_t grid_hash = get64();
  const std::uint64_t size = d * n_nodes;
  require(size > 0 && size < (1u << 20), Errc::bad_format, "cache_load: implausible size");

  OperatorMatrix om;
  om.kind = static_cast<MatrixKind>(kind);
  om.dim = static_cast<int>(d);
  om.n_nodes = n_nodes;
  om.grid_hash = grid_hash;
  om.m.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  std::vector<double> row(size);
  std::uint64_t checksum = 1469598103934665603ull;
  for (std::uint64_t i = 0; i < size; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(double)));
    require(static_cast<std::size_t>(f.gcount()) == row.size() * sizeof(double),
            Errc::bad_format, "cache_load: truncated payload");
    checksum = fnv1a64(row.data(), row.size() * sizeof(double), checksum);
    for (std::uint64_t j = 0; j < size; ++j)
      om.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[static_cast<std::size_t>(j)];
  }
  std::uint64_t stored = get64();
  require(stored == checksum, Errc::bad_format, "cache_load: checksum mismatch in " + path);
  return om;
}

}  // namespace npspect
