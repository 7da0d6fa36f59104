#pragma once

// Thin LAPACKE bindings for the dense symmetric/Hermitian eigensolvers.

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qbattery::detail {

/// In place: `a` (real symmetric, upper triangle read) becomes its
/// eigenvectors; `w` receives ascending eigenvalues.
inline void syevd(Eigen::MatrixXd& a, Eigen::VectorXd& w)
{
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(a.rows());
  if (n == 0) return;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("LAPACKE_dsyevd failed with info=" + std::to_string(info));
}

/// Complex Hermitian counterpart of syevd.
inline void heevd(Eigen::MatrixXcd& a, Eigen::VectorXd& w)
{
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(a.rows());
  if (n == 0) return;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("LAPACKE_zheevd failed with info=" + std::to_string(info));
}

} // namespace qbattery::detail
