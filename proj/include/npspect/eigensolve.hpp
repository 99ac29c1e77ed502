#pragma once

// Thin LAPACK/BLAS wrappers for the dense solves. Column-major throughout,
// matching Eigen's default storage.

#include <cblas.h>
#include <lapacke.h>

#include <string>
#include <vector>

#include "npspect/core.hpp"

namespace npspect {

/// Eigenvalues of a symmetric matrix, ascending. The input is copied.
inline std::vector<double> sym_eigenvalues(Eigen::MatrixXd A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  require(A.rows() == A.cols(), Errc::eigensolve, "sym_eigenvalues: square input required");
  std::vector<double> w(static_cast<std::size_t>(n));
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, A.data(), n, w.data());
  require(info == 0, Errc::eigensolve, "dsyev failed, info=" + std::to_string(info));
  return w;
}

/// Full symmetric eigendecomposition A = V diag(w) V^T, w ascending.
inline void sym_eigendecomp(const Eigen::MatrixXd& A, Eigen::VectorXd& w,
                            Eigen::MatrixXd& V) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  require(A.rows() == A.cols(), Errc::eigensolve, "sym_eigendecomp: square input required");
  V = A;
  w.resize(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, V.data(), n, w.data());
  require(info == 0, Errc::eigensolve, "dsyevd failed, info=" + std::to_string(info));
}

/// Eigenvalues of a general real matrix (no vectors). The input is copied.
inline void general_eigenvalues(Eigen::MatrixXd A, Eigen::VectorXd& re, Eigen::VectorXd& im) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  require(A.rows() == A.cols(), Errc::eigensolve, "general_eigenvalues: square input required");
  re.resize(n);
  im.resize(n);
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, re.data(),
                                  im.data(), nullptr, 1, nullptr, 1);
  require(info == 0, Errc::eigensolve, "dgeev failed, info=" + std::to_string(info));
}

/// C = A * B through BLAS; Eigen's own product is single-threaded.
inline Eigen::MatrixXd gemm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  require(A.cols() == B.rows(), Errc::eigensolve, "gemm: shape mismatch");
  Eigen::MatrixXd C(A.rows(), B.cols());
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(A.rows()),
              static_cast<int>(B.cols()), static_cast<int>(A.cols()), 1.0, A.data(),
              static_cast<int>(A.rows()), B.data(), static_cast<int>(B.rows()), 0.0,
              C.data(), static_cast<int>(C.rows()));
  return C;
}

}  // namespace npspect
