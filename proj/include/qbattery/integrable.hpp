#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qbattery/types.hpp"

namespace qbattery::integrable {

// The translation-invariant transverse-field Ising drive decouples into
// pseudo-spin modes k in (0, pi). Each mode evolves under 2x2 Hamiltonians
//   H_B,k = 2 h_z eta_z,   H_c,k = 2J sin(k) eta_y + (2h_z - 2J cos(k)) eta_z,
// with J = +J0 in the first half period and -J0 in the second, starting from
// the pseudo-spin down state (no fermions in the pair k, -k).

/// Throws std::invalid_argument unless omega > 0, h_z > 0, h0 == 0 and N is
/// even and at least 2.
void validate(const DriveParams& params);

/// k_m = (2m - 1) pi / N for m = 1..N/2.
std::vector<double> mode_grid(int N);

/// Pseudo-spin field (a_y, a_z) of H_c,k = a_y eta_y + a_z eta_z.
struct PseudoSpinField {
  double a_y = 0.0;
  double a_z = 0.0;
};

/// Half-period Hamiltonian with J = sign * J0.
PseudoSpinField half_pulse_hamiltonian(double k, const DriveParams& params, int sign);

/// U = exp(-i beta . eta), with |beta| folded into [0, pi].
struct BlochRotation {
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();

  double angle() const { return beta.norm(); }
  Eigen::Matrix2cd unitary() const;
};

/// One-period mode Floquet operator U = U(second half) * U(first half).
BlochRotation compose_floquet_rotation(double k, const DriveParams& params);

/// Same product as a 2x2 matrix, without the axis-angle extraction; valid
/// at k = 0 and k = pi.
Eigen::Matrix2cd floquet_mode_unitary(double k, const DriveParams& params);

/// 4 h_z sin^2(n|beta|) (1 - beta_z^2/|beta|^2); zero when beta = 0.
double mode_energy(const BlochRotation& rot, long n, double h_z);

struct ModeVariances {
  double varB = 0.0;
  double varC = 0.0;
};

/// Battery variance and the variance of the J = +J0 half-pulse Hamiltonian
/// after n periods.
ModeVariances mode_variances(const BlochRotation& rot, long n, double k, const DriveParams& params);

/// <i [H_c,k, H_B,k]> after n periods, H_c,k taken with J = +J0.
double mode_commutator(const BlochRotation& rot, long n, double k, const DriveParams& params);

struct ModeObservables {
  double k = 0.0;
  double E_k = 0.0;
  double varB_k = 0.0;
  double varC_k = 0.0;
  double commutator_k = 0.0;
};

ModeObservables mode_observables(double k, const DriveParams& params, long n);

/// Whole-chain sums over mode_grid(N), accumulated in ascending k.
/// Requires n >= 1 so that the power is defined.
StroboscopicRecord chain_observables(const DriveParams& params, long n);

/// argmax over n = 1..n_max of the chain power, same tie rule as the ED
/// engine.
PowerMaximum max_power(const DriveParams& params, long n_max);

struct SweepRow {
  double omega = 0.0;
  StroboscopicRecord record;
};

/// chain_observables at each omega, rows in input order.
std::vector<SweepRow> frequency_sweep(const DriveParams& params, const std::vector<double>& omega_grid, long n,
                                      unsigned workers = 1);

enum class ResonanceKind { identity, minus_identity };

struct Resonance {
  double omega = 0.0;
  ResonanceKind kind = ResonanceKind::identity;
  int p = 0;
};

/// Frequencies in [lo, hi] where the k = 0 and k = pi mode operators are
/// the identity (omega = 2h_z/p) or minus the identity (omega = 4h_z/(2p+1)),
/// sorted by frequency.
std::vector<Resonance> predicted_resonances(double h_z, double lo, double hi);

/// max over k in {0, pi} of |U_k - target|, target = +1 or -1.
double boundary_mode_deviation(const DriveParams& params, ResonanceKind kind);

/// Indices i in (0, size-1) with values[i] strictly above or strictly below
/// both neighbours.
std::vector<std::size_t> local_extrema(const std::vector<double>& values);

} // namespace qbattery::integrable
