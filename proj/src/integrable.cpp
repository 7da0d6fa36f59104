#include "qbattery/integrable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qbattery/parallel.hpp"

namespace qbattery::integrable {

namespace {

constexpr double kAxisCutoff = 1e-9;

// SU(2) element w*1 - i v.eta with w^2 + |v|^2 = 1.
struct Su2 {
  double w = 1.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

Su2 operator*(const Su2& a, const Su2& b)
{
  return {a.w * b.w - a.v.dot(b.v), a.w * b.v + b.w * a.v + a.v.cross(b.v)};
}

// exp(-i t (a_y eta_y + a_z eta_z))
Su2 field_rotation(const PseudoSpinField& f, double t)
{
  const double r = std::hypot(f.a_y, f.a_z);
  if (r == 0.0) return {};
  const double s = std::sin(r * t) / r;
  return {std::cos(r * t), Eigen::Vector3d(0.0, s * f.a_y, s * f.a_z)};
}

Su2 floquet_su2(double k, const DriveParams& params)
{
  const double half = 0.5 * params.period();
  const Su2 first = field_rotation(half_pulse_hamiltonian(k, params, +1), half);
  const Su2 second = field_rotation(half_pulse_hamiltonian(k, params, -1), half);
  return second * first;
}

Eigen::Matrix2cd to_matrix(const Su2& u)
{
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  // w - i (x eta_x + y eta_y + z eta_z)
  m(0, 0) = u.w - i * u.v.z();
  m(1, 1) = u.w + i * u.v.z();
  m(0, 1) = -i * u.v.x() - u.v.y();
  m(1, 0) = -i * u.v.x() + u.v.y();
  return m;
}

// Bloch-vector components of exp(-i n beta.eta)|down> needed by the
// variance and commutator closed forms.
struct EvolvedSpin {
  double sin_nb = 0.0;
  double cos_nb = 1.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  bool trivial = true;
};

EvolvedSpin evolve(const BlochRotation& rot, long n)
{
  EvolvedSpin s;
  const double b = rot.angle();
  if (b == 0.0 || n == 0) return s;
  const double nb = static_cast<double>(n) * b;
  s.sin_nb = std::sin(nb);
  s.cos_nb = std::cos(nb);
  s.axis = rot.beta / b;
  s.trivial = false;
  return s;
}

} // namespace

void validate(const DriveParams& params)
{
  if (!(params.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(params.h_z > 0.0)) throw std::invalid_argument("h_z must be positive");
  if (params.h0 != 0.0) throw std::invalid_argument("the integrable solver requires h0 = 0");
  if (params.N < 2 || params.N % 2 != 0) {
    throw std::invalid_argument("the integrable solver requires an even N >= 2, got " + std::to_string(params.N));
  }
}

std::vector<double> mode_grid(int N)
{
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("mode grid requires an even N >= 2, got " + std::to_string(N));
  std::vector<double> ks;
  ks.reserve(static_cast<std::size_t>(N / 2));
  for (int m = 1; m <= N / 2; ++m) ks.push_back((2.0 * m - 1.0) * pi / N);
  return ks;
}

PseudoSpinField half_pulse_hamiltonian(double k, const DriveParams& params, int sign)
{
  const double j = sign * params.J0;
  return {2.0 * j * std::sin(k), 2.0 * params.h_z - 2.0 * j * std::cos(k)};
}

Eigen::Matrix2cd BlochRotation::unitary() const
{
  const double b = angle();
  if (b == 0.0) return Eigen::Matrix2cd::Identity();
  return to_matrix({std::cos(b), std::sin(b) * beta / b});
}

BlochRotation compose_floquet_rotation(double k, const DriveParams& params)
{
  const Su2 u = floquet_su2(k, params);
  const double s = u.v.norm();
  const double angle = std::atan2(s, u.w);
  BlochRotation rot;
  if (angle < kAxisCutoff) return rot;
  // near -1 the axis is ill-conditioned; any axis reproduces U = -1
  rot.beta = s > 0.0 ? Eigen::Vector3d(angle * u.v / s) : Eigen::Vector3d(0.0, 0.0, angle);
  return rot;
}

Eigen::Matrix2cd floquet_mode_unitary(double k, const DriveParams& params)
{
  return to_matrix(floquet_su2(k, params));
}

double mode_energy(const BlochRotation& rot, long n, double h_z)
{
  const EvolvedSpin s = evolve(rot, n);
  if (s.trivial) return 0.0;
  const double uz = s.axis.z();
  return 4.0 * h_z * s.sin_nb * s.sin_nb * (1.0 - uz * uz);
}

ModeVariances mode_variances(const BlochRotation& rot, long n, double k, const DriveParams& params)
{
  const PseudoSpinField h = half_pulse_hamiltonian(k, params, +1);
  const double h_sq = h.a_y * h.a_y + h.a_z * h.a_z;
  const EvolvedSpin s = evolve(rot, n);
  if (s.trivial) return {0.0, h.a_y * h.a_y}; // <eta_z> = -1, <eta_y> = 0

  const double uz2 = s.axis.z() * s.axis.z();
  const double s2 = s.sin_nb * s.sin_nb;
  ModeVariances out;
  out.varB = 16.0 * params.h_z * params.h_z * s2 * (1.0 - uz2) * (s.cos_nb * s.cos_nb + s2 * uz2);

  const double energy = 4.0 * params.h_z * s2 * (1.0 - uz2);
  const double eta_z = energy / (2.0 * params.h_z) - 1.0;
  const double eta_y = 2.0 * s.sin_nb * (s.axis.x() * s.cos_nb - s.axis.y() * s.axis.z() * s.sin_nb);
  const double mean = h.a_z * eta_z + h.a_y * eta_y;
  out.varC = std::max(0.0, h_sq - mean * mean);
  return out;
}

double mode_commutator(const BlochRotation& rot, long n, double k, const DriveParams& params)
{
  const EvolvedSpin s = evolve(rot, n);
  if (s.trivial) return 0.0;
  const PseudoSpinField h = half_pulse_hamiltonian(k, params, +1);
  const double eta_x = -2.0 * s.sin_nb * (s.axis.y() * s.cos_nb + s.axis.x() * s.axis.z() * s.sin_nb);
  // i[a_y eta_y + a_z eta_z, 2 h_z eta_z] = -4 h_z a_y eta_x
  return -4.0 * params.h_z * h.a_y * eta_x;
}

ModeObservables mode_observables(double k, const DriveParams& params, long n)
{
  const BlochRotation rot = compose_floquet_rotation(k, params);
  const ModeVariances var = mode_variances(rot, n, k, params);
  return {k, mode_energy(rot, n, params.h_z), var.varB, var.varC, mode_commutator(rot, n, k, params)};
}

StroboscopicRecord chain_observables(const DriveParams& params, long n)
{
  validate(params);
  if (n < 1) throw std::invalid_argument("stroboscopic step must be >= 1 for the power to be defined");
  StroboscopicRecord rec;
  rec.n = n;
  double commutator = 0.0;
  for (double k : mode_grid(params.N)) {
    const ModeObservables m = mode_observables(k, params, n);
    rec.E += m.E_k;
    rec.varB += m.varB_k;
    rec.varC += m.varC_k;
    commutator += m.commutator_k;
  }
  rec.P = rec.E / (static_cast<double>(n) * params.period());
  rec.bound_slack = 2.0 * std::sqrt(rec.varB * rec.varC) - std::abs(commutator);
  return rec;
}

PowerMaximum max_power(const DriveParams& params, long n_max)
{
  if (n_max < 1) throw std::invalid_argument("max_power needs n_max >= 1");
  validate(params);
  const std::vector<double> ks = mode_grid(params.N);
  std::vector<BlochRotation> rotations;
  rotations.reserve(ks.size());
  for (double k : ks) rotations.push_back(compose_floquet_rotation(k, params));

  PowerMaximum best{1, 0.0};
  for (long n = 1; n <= n_max; ++n) {
    double energy = 0.0;
    for (const BlochRotation& rot : rotations) energy += mode_energy(rot, n, params.h_z);
    const double p = energy / (static_cast<double>(n) * params.period());
    if (n == 1 || p > best.P_star + power_tie_tolerance * std::max(1.0, std::abs(best.P_star))) best = {n, p};
  }
  return best;
}

std::vector<SweepRow> frequency_sweep(const DriveParams& params, const std::vector<double>& omega_grid, long n,
                                      unsigned workers)
{
  if (omega_grid.empty()) throw std::invalid_argument("frequency sweep needs a non-empty omega grid");
  for (double w : omega_grid) {
    if (!(w > 0.0)) throw std::invalid_argument("frequency sweep omega values must be positive");
  }
  return parallel_map(omega_grid.size(), workers, [&](std::size_t i) {
    DriveParams p = params;
    p.omega = omega_grid[i];
    return SweepRow{p.omega, chain_observables(p, n)};
  });
}

std::vector<Resonance> predicted_resonances(double h_z, double lo, double hi)
{
  std::vector<Resonance> out;
  for (int p = 1; 2.0 * h_z / p >= lo; ++p) {
    const double w = 2.0 * h_z / p;
    if (w <= hi) out.push_back({w, ResonanceKind::identity, p});
  }
  for (int p = 0; 4.0 * h_z / (2 * p + 1) >= lo; ++p) {
    const double w = 4.0 * h_z / (2 * p + 1);
    if (w <= hi) out.push_back({w, ResonanceKind::minus_identity, p});
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) { return a.omega < b.omega; });
  return out;
}

double boundary_mode_deviation(const DriveParams& params, ResonanceKind kind)
{
  const double target = kind == ResonanceKind::identity ? 1.0 : -1.0;
  double worst = 0.0;
  for (double k : {0.0, pi}) {
    const Eigen::Matrix2cd u = floquet_mode_unitary(k, params);
    worst = std::max(worst, (u - target * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<std::size_t> local_extrema(const std::vector<double>& values)
{
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const double a = values[i - 1];
    const double b = values[i];
    const double c = values[i + 1];
    if ((b > a && b > c) || (b < a && b < c)) out.push_back(i);
  }
  return out;
}

} // namespace qbattery::integrable
