#pragma once

#include <vector>

namespace qbattery {

/// Ordinary least squares y = slope*x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// y = prefactor * x^exponent, fitted as a line in (log x, log y). The
/// residual is the RMS of the log-space residuals.
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

} // namespace qbattery
