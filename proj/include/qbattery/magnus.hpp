#pragma once

#include <array>
#include <vector>

#include "qbattery/dense.hpp"
#include "qbattery/types.hpp"

namespace qbattery::magnus {

// High-frequency expansion of the square-pulse Floquet Hamiltonian,
//   H_F = B0 + (T/2) B1 - (T^2/3) B2 - (T^3/24) B3 + O(T^4),
// with the brackets Bm written as Pauli-string sums on the chain described
// by params.N and params.boundary. The brackets are the translation-invariant
// forms, exact on a ring; on an open chain B2 and B3 lack edge corrections,
// so the open-chain truncation error stops improving beyond first order.

inline constexpr int max_order = 3;

/// The T-independent brackets B0..B3 and the prefactors that multiply them.
struct MagnusExpansion {
  std::array<PauliStringOperator, max_order + 1> brackets;
  double period = 0.0;

  /// Prefactor of bracket m at this period: 1, T/2, -T^2/3, -T^3/24.
  double prefactor(int order) const;
  /// prefactor(order) * brackets[order]
  PauliStringOperator term(int order) const;
  /// Sum of the terms up to and including `order`.
  PauliStringOperator truncated(int order) const;
};

/// Throws std::invalid_argument for a chain the site sums cannot express.
MagnusExpansion expand(const DriveParams& params);

/// Truncated Floquet Hamiltonian through order T^order, order in 0..3.
PauliStringOperator magnus_floquet(const DriveParams& params, int order);

/// Largest chain commutator_oracle and nested_integral accept.
inline constexpr int oracle_max_sites = 8;

/// Dense [A, B] on N sites; N <= oracle_max_sites.
DenseOperator commutator_oracle(const PauliStringOperator& a, const PauliStringOperator& b, int sites);

/// The time-ordered nested commutator integral of the given order for the
/// piecewise-constant drive H_c(t) = H1 on (0, T/2), H2 on (T/2, T),
/// including the leading 1/T:
///   order 1: (1/T) int [H(t1), H(t2)]
///   order 2: (1/T) int ([H(t1), [H(t2), H(t3)]] + [H(t3), [H(t2), H(t1)]])
///   order 3: (1/T) int of the four fourfold nestings
/// over T > t1 > t2 > ... > 0. Each integral is evaluated exactly by
/// splitting the simplex at T/2.
Eigen::MatrixXcd nested_integral(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& h2, double period, int order);

/// max-norm of (exact principal-log H_F - truncated Magnus H_F) relative to
/// max-norm of the exact H_F. Requires N <= magnus_error_max_sites and a
/// period short enough that no quasi-energy can leave the principal branch;
/// otherwise throws GuardError.
inline constexpr int magnus_error_max_sites = 10;
double magnus_error(const DriveParams& params, int order);
/// magnus_error for several orders sharing one exact diagonalization.
std::vector<double> magnus_errors(const DriveParams& params, const std::vector<int>& orders);

/// Loose bound (T/2)(|H1| + |H2|) on the largest Floquet phase, computed
/// from coupling magnitudes and the number of terms.
double phase_bound(const DriveParams& params);

} // namespace qbattery::magnus
