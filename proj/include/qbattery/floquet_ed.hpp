#pragma once

#include <vector>

#include "qbattery/dense.hpp"
#include "qbattery/fit.hpp"
#include "qbattery/types.hpp"

namespace qbattery::ed {

/// Full many-body chain for exact diagonalization. The boundary lives in
/// params.boundary; h0 may be nonzero.
struct ChainSpec {
  DriveParams params;
};

/// Throws std::invalid_argument for omega <= 0, N < 2 (open) or N < 3
/// (periodic), and GuardError when N exceeds the dense-size guard.
void validate(const ChainSpec& spec);

struct ChainHamiltonians {
  PauliStringOperator battery;     // h_z sum Z
  PauliStringOperator first_half;  // H_B + J0 sum XX + h0 sum X
  PauliStringOperator second_half; // H_B - J0 sum XX - h0 sum X
};

ChainHamiltonians build_hamiltonians(const ChainSpec& spec);

/// One-period evolution U_F = exp(-i H2 T/2) exp(-i H1 T/2), its principal
/// Floquet Hamiltonian and eigensystem. Immutable once built.
class FloquetSystem {
public:
  const ChainSpec& spec() const { return spec_; }
  int sites() const { return spec_.params.N; }
  double period() const { return spec_.params.period(); }

  const DenseOperator& floquet_unitary() const { return u_f_; }
  const DenseOperator& floquet_hamiltonian() const { return h_f_; }
  const UnitaryDecomposition& floquet_eig() const { return eig_; }
  const DenseOperator& battery() const { return h_b_; }
  const DenseOperator& first_half() const { return h_1_; }
  const DenseOperator& second_half() const { return h_2_; }
  /// All spins down: the ground state of the battery Hamiltonian.
  const Eigen::VectorXcd& initial_state() const { return psi0_; }
  /// diag(H_B) + N h_z: basis-state energies above the ground state.
  const Eigen::VectorXd& excitation_spectrum() const { return shifted_battery_; }

  /// Principal-branch quasi-energies, ascending.
  Eigen::VectorXd quasi_energies() const { return qbattery::quasi_energies(eig_, period()); }

  /// (U_F)^n |psi0> through the eigendecomposition.
  Eigen::VectorXcd evolved_state(long n) const;

  /// E(n) for n = 1..n_max; the only observable the power scan needs.
  std::vector<double> energy_series(long n_max) const;

private:
  friend FloquetSystem floquet_operator(const ChainSpec& spec);

  ChainSpec spec_;
  DenseOperator u_f_;
  DenseOperator h_f_;
  UnitaryDecomposition eig_;
  DenseOperator h_b_;
  DenseOperator h_1_;
  DenseOperator h_2_;
  Eigen::VectorXcd psi0_;
  Eigen::VectorXcd psi0_coeffs_; // V^dagger psi0
  Eigen::VectorXd shifted_battery_; // diag(H_B) + N h_z, nonnegative
};

FloquetSystem floquet_operator(const ChainSpec& spec);

/// Records for n = 1..n_max. varC is the variance of H1 and bound_slack
/// uses <i[H1, H_B]>.
std::vector<StroboscopicRecord> stroboscopic_series(const FloquetSystem& sys, long n_max);

/// Spread of the quasi-energy spectrum, at most 2 pi / T.
double bandwidth(const FloquetSystem& sys);

/// argmax over n = 1..n_max of E(n)/(nT). Values within a relative 1e-12
/// of the running maximum count as ties and keep the smaller n.
PowerMaximum max_power(const FloquetSystem& sys, long n_max);

struct PowerScalingRow {
  int N = 0;
  long n_star = 0;
  double P_star = 0.0;
};

struct PowerScaling {
  std::vector<PowerScalingRow> rows;
  PowerLawFit fit;
};

/// max_power for each N (the template's N is replaced), plus a power-law
/// fit of P_star against N. Needs at least three N values.
PowerScaling power_scaling(const ChainSpec& spec_template, const std::vector<int>& N_list, long n_max,
                           unsigned workers = 1);

/// prod_j Z_j
DenseOperator parity_operator(int sites);
/// Cyclic shift moving the state of site j to site j+1 (mod N).
DenseOperator translation_operator(int sites);

} // namespace qbattery::ed
