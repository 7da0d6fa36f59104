#pragma once

#include "qbattery/common.hpp"
#include "qbattery/pauli.hpp"

namespace qbattery {

/// Couplings and drive of the square-pulse charging protocol. During the
/// first half period the Ising coupling is +J0 and the longitudinal field
/// +h0, during the second half both change sign.
struct DriveParams {
  double h_z = 2.0;   // transverse (battery) field
  double J0 = 1.0;    // Ising coupling amplitude
  double h0 = 0.0;    // longitudinal field amplitude
  double omega = 1.0; // drive angular frequency
  int N = 2;          // number of sites
  Boundary boundary = Boundary::periodic;

  double period() const { return 2.0 * pi / omega; }
};

/// Observables at the stroboscopic instant t = nT.
struct StroboscopicRecord {
  long n = 0;
  double E = 0.0;           // stored energy
  double P = 0.0;           // average power E/(nT)
  double varB = 0.0;        // variance of the battery Hamiltonian
  double varC = 0.0;        // variance of the first-half charging Hamiltonian
  double bound_slack = 0.0; // 2 sqrt(varB varC) - |<i[H_c, H_B]>|
};

/// Largest average power over n = 1..n_max and the step where it occurs.
struct PowerMaximum {
  long n_star = 1;
  double P_star = 0.0;
};

/// Relative tolerance under which a later power counts as a tie with the
/// running maximum; ties keep the smaller n.
inline constexpr double power_tie_tolerance = 1e-12;

} // namespace qbattery
