#include "qbattery/magnus.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbattery/floquet_ed.hpp"

namespace qbattery::magnus {

namespace {

void check_order(int order)
{
  if (order < 0 || order > max_order) {
    throw std::invalid_argument("Magnus order must be in 0.." + std::to_string(max_order) + ", got " +
                                std::to_string(order));
  }
}

// Sum of the pattern and its mirror image, e.g. XY + YX.
PauliStringOperator symmetric_pair(const char* ab, const char* ba, const DriveParams& p)
{
  return site_sum(ab, p.N, p.boundary) + site_sum(ba, p.N, p.boundary);
}

Eigen::MatrixXcd comm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
  return a * b - b * a;
}

using Nesting = std::function<Eigen::MatrixXcd(const std::vector<const Eigen::MatrixXcd*>&)>;

// (1/T) * integral over T > t_1 > ... > t_k > 0 of f(H(t_1), ..., H(t_k)).
// With m of the times in the second half, the later m arguments are H2 and
// the region is a product of two simplices of volume (T/2)^m/m! and
// (T/2)^(k-m)/(k-m)!.
Eigen::MatrixXcd piecewise_integral(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& h2, double period, int k,
                                    const Nesting& f)
{
  const double half = 0.5 * period;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(h1.rows(), h1.cols());
  for (int m = 0; m <= k; ++m) {
    std::vector<const Eigen::MatrixXcd*> args;
    for (int j = 0; j < m; ++j) args.push_back(&h2);
    for (int j = m; j < k; ++j) args.push_back(&h1);
    const double volume = std::pow(half, m) / std::tgamma(m + 1.0) * std::pow(half, k - m) / std::tgamma(k - m + 1.0);
    total += volume * f(args);
  }
  return total / period;
}

} // namespace

double MagnusExpansion::prefactor(int order) const
{
  check_order(order);
  const double t = period;
  switch (order) {
  case 0: return 1.0;
  case 1: return t / 2.0;
  case 2: return -t * t / 3.0;
  default: return -t * t * t / 24.0;
  }
}

PauliStringOperator MagnusExpansion::term(int order) const
{
  return brackets[static_cast<std::size_t>(order)] * prefactor(order);
}

PauliStringOperator MagnusExpansion::truncated(int order) const
{
  check_order(order);
  PauliStringOperator out = term(0);
  for (int m = 1; m <= order; ++m) out += term(m);
  return out;
}

MagnusExpansion expand(const DriveParams& p)
{
  if (!(p.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const int min_sites = p.boundary == Boundary::periodic ? 3 : 2;
  if (p.N < min_sites) {
    throw std::invalid_argument(std::string(to_string(p.boundary)) + " chains need N >= " +
                                std::to_string(min_sites) + ", got " + std::to_string(p.N));
  }
  const double hz = p.h_z, j0 = p.J0, h0 = p.h0;
  const int n = p.N;
  const Boundary b = p.boundary;

  MagnusExpansion out;
  out.period = p.period();
  out.brackets[0] = site_sum("Z", n, b, hz);

  out.brackets[1] = symmetric_pair("XY", "YX", p) * (hz * j0) + site_sum("Y", n, b, hz * h0);

  out.brackets[2] = symmetric_pair("ZX", "XZ", p) * (h0 * j0 * hz) +
                    site_sum("Z", n, b, hz * (j0 * j0 + 0.5 * h0 * h0)) + site_sum("XZX", n, b, j0 * j0 * hz);

  out.brackets[3] = symmetric_pair("XY", "YX", p) * (hz * j0 * (4.0 * j0 * j0 + 3.0 * h0 * h0 - 4.0 * hz * hz)) +
                    site_sum("Y", n, b, h0 * hz * (6.0 * j0 * j0 + h0 * h0 - hz * hz)) +
                    site_sum("XYX", n, b, 6.0 * h0 * j0 * j0 * hz);
  return out;
}

PauliStringOperator magnus_floquet(const DriveParams& params, int order)
{
  check_order(order);
  return expand(params).truncated(order);
}

DenseOperator commutator_oracle(const PauliStringOperator& a, const PauliStringOperator& b, int sites)
{
  if (sites > oracle_max_sites) {
    throw GuardError("commutator oracle is limited to " + std::to_string(oracle_max_sites) + " sites");
  }
  const DenseOperator da = materialize(a, sites);
  const DenseOperator db = materialize(b, sites);
  return DenseOperator(comm(da.matrix(), db.matrix()));
}

Eigen::MatrixXcd nested_integral(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& h2, double period, int order)
{
  if (h1.rows() != h2.rows() || h1.rows() != h1.cols() || h2.rows() != h2.cols()) {
    throw std::invalid_argument("nested_integral needs square operators of equal size");
  }
  if (h1.rows() > (Eigen::Index{1} << oracle_max_sites)) {
    throw GuardError("nested_integral is limited to " + std::to_string(oracle_max_sites) + " sites");
  }
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  using Args = std::vector<const Eigen::MatrixXcd*>;
  switch (order) {
  case 1:
    return piecewise_integral(h1, h2, period, 2, [](const Args& h) { return comm(*h[0], *h[1]); });
  case 2:
    return piecewise_integral(h1, h2, period, 3, [](const Args& h) {
      return Eigen::MatrixXcd(comm(*h[0], comm(*h[1], *h[2])) + comm(*h[2], comm(*h[1], *h[0])));
    });
  case 3:
    return piecewise_integral(h1, h2, period, 4, [](const Args& h) {
      const auto& a = *h[0];
      const auto& b = *h[1];
      const auto& c = *h[2];
      const auto& d = *h[3];
      return Eigen::MatrixXcd(comm(comm(comm(a, b), c), d) + comm(a, comm(comm(b, c), d)) +
                              comm(a, comm(b, comm(c, d))) + comm(b, comm(c, comm(d, a))));
    });
  default:
    throw std::invalid_argument("nested_integral order must be 1, 2 or 3, got " + std::to_string(order));
  }
}

double phase_bound(const DriveParams& p)
{
  const double bonds = p.boundary == Boundary::periodic ? p.N : p.N - 1;
  const double norm = p.N * std::abs(p.h_z) + bonds * std::abs(p.J0) + p.N * std::abs(p.h0);
  // H1 and H2 share the same bound
  return 0.5 * p.period() * 2.0 * norm;
}

std::vector<double> magnus_errors(const DriveParams& params, const std::vector<int>& orders)
{
  for (int order : orders) check_order(order);
  if (params.N > magnus_error_max_sites) {
    throw GuardError("magnus_error is limited to " + std::to_string(magnus_error_max_sites) + " sites");
  }
  const double bound = phase_bound(params);
  if (bound >= pi) {
    throw GuardError("period " + std::to_string(params.period()) + " lets Floquet phases reach " +
                     std::to_string(bound) + " >= pi; the principal logarithm would fold");
  }
  const ed::FloquetSystem sys = ed::floquet_operator(ed::ChainSpec{params});
  const Eigen::MatrixXcd& exact = sys.floquet_hamiltonian().matrix();
  const double scale = exact.cwiseAbs().maxCoeff();
  const MagnusExpansion expansion = expand(params);
  std::vector<double> out;
  out.reserve(orders.size());
  for (int order : orders) {
    const DenseOperator approx = materialize(expansion.truncated(order), params.N);
    const double diff = (exact - approx.matrix()).cwiseAbs().maxCoeff();
    out.push_back(scale == 0.0 ? diff : diff / scale);
  }
  return out;
}

double magnus_error(const DriveParams& params, int order)
{
  return magnus_errors(params, {order}).front();
}

} // namespace qbattery::magnus
