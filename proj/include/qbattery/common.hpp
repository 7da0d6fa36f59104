#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qbattery {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Raised when a numerical guard trips: a dense operator larger than the
/// configured memory budget, or a quasi-energy branch that would fold.
class GuardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Default cap on the number of sites for dense 2^N operators.
inline constexpr int default_max_sites = 14;

/// Effective dense-size cap: `QBATTERY_MAX_N` when set to a positive
/// integer, otherwise default_max_sites.
int max_dense_sites();

/// Throws GuardError when `sites` exceeds max_dense_sites().
void check_dense_sites(int sites);

} // namespace qbattery
