#include "qbattery/floquet_ed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qbattery/parallel.hpp"

namespace qbattery::ed {

void validate(const ChainSpec& spec)
{
  const DriveParams& p = spec.params;
  if (!(p.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const int min_sites = p.boundary == Boundary::periodic ? 3 : 2;
  if (p.N < min_sites) {
    throw std::invalid_argument(std::string(to_string(p.boundary)) + " chains need N >= " +
                                std::to_string(min_sites) + ", got " + std::to_string(p.N));
  }
  check_dense_sites(p.N);
}

ChainHamiltonians build_hamiltonians(const ChainSpec& spec)
{
  validate(spec);
  const DriveParams& p = spec.params;
  PauliStringOperator battery = site_sum("Z", p.N, p.boundary, p.h_z);
  PauliStringOperator drive = site_sum("XX", p.N, p.boundary, p.J0) + site_sum("X", p.N, p.boundary, p.h0);
  return {battery, battery + drive, battery - drive};
}

Eigen::VectorXcd FloquetSystem::evolved_state(long n) const
{
  Eigen::VectorXcd c = psi0_coeffs_;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    // lambda^n from the phase directly, no repeated products
    c(j) *= std::polar(1.0, static_cast<double>(n) * std::arg(eig_.values(j)));
  }
  return eig_.vectors * c;
}

std::vector<double> FloquetSystem::energy_series(long n_max) const
{
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n_max, 0L)));
  for (long n = 1; n <= n_max; ++n) {
    const Eigen::VectorXcd psi = evolved_state(n);
    out.push_back((shifted_battery_.array() * psi.array().abs2()).sum());
  }
  return out;
}

FloquetSystem floquet_operator(const ChainSpec& spec)
{
  const ChainHamiltonians ham = build_hamiltonians(spec);
  const int n_sites = spec.params.N;
  const double period = spec.params.period();

  FloquetSystem sys;
  sys.spec_ = spec;
  sys.h_b_ = materialize(ham.battery, n_sites);
  sys.h_1_ = materialize(ham.first_half, n_sites);
  sys.h_2_ = materialize(ham.second_half, n_sites);

  const EigenDecomposition eig1 = hermitian_eig(sys.h_1_);
  {
    const EigenDecomposition eig2 = hermitian_eig(sys.h_2_);
    Eigen::MatrixXcd second = unitary_exp(eig2, 0.5 * period).release();
    {
      const Eigen::MatrixXcd first = unitary_exp(eig1, 0.5 * period).release();
      sys.u_f_ = DenseOperator(apply_unitary_exp(eig2, 0.5 * period, first));
    }
    if (eig1.is_real()) {
      // W = S e^{-i H2 T/2} S with S = e^{-i H1 T/4} is complex symmetric and
      // similar to U_F (U_F = S^-1 W S), so its Hermitian part is real.
      Eigen::MatrixXcd w = apply_unitary_exp(eig1, 0.25 * period, second);
      second.resize(0, 0);
      w.transposeInPlace();
      w = apply_unitary_exp(eig1, 0.25 * period, w);
      w.transposeInPlace();
      w = (0.5 * (w + w.transpose())).eval();
      UnitaryDecomposition eig_w = unitary_eig(DenseOperator(std::move(w)));
      sys.eig_.values = std::move(eig_w.values);
      sys.eig_.vectors = apply_unitary_exp(eig1, -0.25 * period, eig_w.vectors);
    }
  }
  if (!eig1.is_real()) sys.eig_ = unitary_eig(sys.u_f_);

  sys.h_f_ = principal_log(sys.eig_, period);

  const Eigen::Index dim = sys.u_f_.dim();
  sys.psi0_ = Eigen::VectorXcd::Zero(dim);
  sys.psi0_(dim - 1) = 1.0;
  sys.psi0_coeffs_ = sys.eig_.vectors.row(dim - 1).adjoint();
  sys.shifted_battery_ = sys.h_b_.matrix().diagonal().real().array() + n_sites * spec.params.h_z;
  return sys;
}

std::vector<StroboscopicRecord> stroboscopic_series(const FloquetSystem& sys, long n_max)
{
  if (n_max < 1) throw std::invalid_argument("stroboscopic_series needs n_max >= 1");
  const auto excitation = sys.excitation_spectrum().array();
  const Eigen::MatrixXcd& h1 = sys.first_half().matrix();
  std::vector<StroboscopicRecord> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (long n = 1; n <= n_max; ++n) {
    const Eigen::VectorXcd psi = sys.evolved_state(n);
    const Eigen::ArrayXd prob = psi.array().abs2();
    StroboscopicRecord rec;
    rec.n = n;
    rec.E = (excitation * prob).sum();
    rec.P = rec.E / (static_cast<double>(n) * sys.period());
    rec.varB = std::max(0.0, (excitation.square() * prob).sum() - rec.E * rec.E);

    const Eigen::VectorXcd h1_psi = h1 * psi;
    const double mean_c = psi.dot(h1_psi).real();
    rec.varC = std::max(0.0, h1_psi.squaredNorm() - mean_c * mean_c);
    // H_B shifted by a constant leaves the commutator unchanged;
    // <i[H1, H_B]> = -2 Im <H1 psi | H_B psi>
    const Eigen::VectorXcd hb_psi = (excitation.cast<cplx>() * psi.array()).matrix();
    const double commutator = -2.0 * h1_psi.dot(hb_psi).imag();
    rec.bound_slack = 2.0 * std::sqrt(rec.varB * rec.varC) - std::abs(commutator);
    out.push_back(rec);
  }
  return out;
}

double bandwidth(const FloquetSystem& sys)
{
  const Eigen::VectorXd q = sys.quasi_energies();
  return q.maxCoeff() - q.minCoeff();
}

PowerMaximum max_power(const FloquetSystem& sys, long n_max)
{
  if (n_max < 1) throw std::invalid_argument("max_power needs n_max >= 1");
  const std::vector<double> energy = sys.energy_series(n_max);
  PowerMaximum best{1, energy.front() / sys.period()};
  for (long n = 2; n <= n_max; ++n) {
    const double p = energy[static_cast<std::size_t>(n - 1)] / (static_cast<double>(n) * sys.period());
    if (p > best.P_star + power_tie_tolerance * std::max(1.0, std::abs(best.P_star))) best = {n, p};
  }
  return best;
}

PowerScaling power_scaling(const ChainSpec& spec_template, const std::vector<int>& N_list, long n_max,
                           unsigned workers)
{
  if (N_list.size() < 3) throw std::invalid_argument("power scaling fit needs at least three N values");
  for (int n : N_list) {
    ChainSpec s = spec_template;
    s.params.N = n;
    validate(s);
  }
  PowerScaling out;
  out.rows = parallel_map(N_list.size(), workers, [&](std::size_t i) {
    ChainSpec s = spec_template;
    s.params.N = N_list[i];
    const PowerMaximum m = max_power(floquet_operator(s), n_max);
    return PowerScalingRow{N_list[i], m.n_star, m.P_star};
  });
  std::vector<double> xs, ys;
  for (const auto& r : out.rows) {
    xs.push_back(r.N);
    ys.push_back(r.P_star);
  }
  out.fit = fit_power_law(xs, ys);
  return out;
}

DenseOperator parity_operator(int sites)
{
  check_dense_sites(sites);
  const Eigen::Index dim = Eigen::Index{1} << sites;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) m(x, x) = (std::popcount(static_cast<std::uint64_t>(x)) & 1) ? -1.0 : 1.0;
  return DenseOperator(std::move(m));
}

DenseOperator translation_operator(int sites)
{
  check_dense_sites(sites);
  const Eigen::Index dim = Eigen::Index{1} << sites;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  // site j is bit (sites-1-j); moving j -> j+1 is a right rotation of the bits
  for (Eigen::Index x = 0; x < dim; ++x) {
    const auto ux = static_cast<std::uint64_t>(x);
    const std::uint64_t y = (ux >> 1) | ((ux & 1u) << (sites - 1));
    m(static_cast<Eigen::Index>(y), x) = 1.0;
  }
  return DenseOperator(std::move(m));
}

} // namespace qbattery::ed
