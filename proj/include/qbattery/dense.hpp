#pragma once

#include <Eigen/Dense>

#include "qbattery/common.hpp"
#include "qbattery/pauli.hpp"

namespace qbattery {

/// Complex 2^N x 2^N matrix acting on an N-site chain.
class DenseOperator {
public:
  DenseOperator() = default;
  /// Takes ownership of a square matrix whose dimension is a power of two.
  explicit DenseOperator(Eigen::MatrixXcd m);

  static DenseOperator zero(int sites);
  static DenseOperator identity(int sites);

  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::MatrixXcd release() && { return std::move(m_); }

  Eigen::Index dim() const { return m_.rows(); }
  int sites() const { return sites_; }

  double max_norm() const;
  /// max |A - A^dagger|
  double hermiticity_error() const;
  /// max |A^dagger A - 1|; one dense product.
  double unitarity_error() const;
  /// True when every imaginary part is exactly zero.
  bool is_real() const;

private:
  Eigen::MatrixXcd m_;
  int sites_ = 0;
};

/// Eigensystem of a Hermitian operator, eigenvalues ascending. Real
/// symmetric input keeps real eigenvectors so that products with them run
/// in real arithmetic.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd real_vectors;     // set when the input was real
  Eigen::MatrixXcd complex_vectors; // set otherwise

  bool is_real() const { return complex_vectors.size() == 0; }
  Eigen::Index dim() const { return values.size(); }
  /// Eigenvectors as columns, converted to complex when stored real.
  Eigen::MatrixXcd vectors() const;
};

/// Eigensystem of a unitary: unit-modulus eigenvalues ordered by ascending
/// principal phase, eigenvectors orthonormal columns.
struct UnitaryDecomposition {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;

  Eigen::Index dim() const { return values.size(); }
};

/// Sum of coeff * (tensor product of Paulis) as a dense matrix. Hermiticity
/// of the result is verified.
DenseOperator materialize(const PauliStringOperator& op, int sites);

EigenDecomposition hermitian_eig(const DenseOperator& a);

/// Diagonalizes a unitary through a Hermitian function of it, then resolves
/// any eigenvalues that function merges by diagonalizing the coupled blocks
/// of V^dagger U V exactly.
UnitaryDecomposition unitary_eig(const DenseOperator& u);

/// exp(-i H t)
DenseOperator unitary_exp(const DenseOperator& h, double t);
DenseOperator unitary_exp(const EigenDecomposition& eig, double t);

/// exp(-i H t) * x without forming the exponential explicitly.
Eigen::MatrixXcd apply_unitary_exp(const EigenDecomposition& eig, double t, const Eigen::MatrixXcd& x);

/// theta in (-pi, pi] with lambda = exp(-i theta). Phases within 1e-12 of
/// -pi are placed on +pi.
double principal_phase(cplx lambda);

/// Quasi-energies theta_j / period, each in (-pi/period, pi/period].
Eigen::VectorXd quasi_energies(const UnitaryDecomposition& eig, double period);

/// H with U = exp(-i H period), spectrum on the principal branch.
DenseOperator principal_log(const DenseOperator& u, double period);
DenseOperator principal_log(const UnitaryDecomposition& eig, double period);

/// V * diag(values) * V^dagger.
Eigen::MatrixXcd reconstruct(const Eigen::MatrixXcd& vectors, const Eigen::VectorXcd& values);

} // namespace qbattery
