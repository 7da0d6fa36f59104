#include "qbattery/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lapack.hpp"

namespace qbattery {

namespace {

int sites_for_dim(Eigen::Index dim)
{
  if (dim < 1 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw std::invalid_argument("operator dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

// Offset of the Hermitian function used by unitary_eig: eigenvalues of
// (e^{i phi} U + e^{-i phi} U^dagger)/2 are cos(phi - theta).
constexpr double kPhaseOffset = 0.7390851332151607;
constexpr double kCouplingTolerance = 1e-12;
constexpr double kBranchSnap = 1e-12;

// Union-find over eigenvector indices.
class Components {
public:
  explicit Components(Eigen::Index n) : parent_(static_cast<std::size_t>(n))
  {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index i)
  {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      auto& p = parent_[static_cast<std::size_t>(i)];
      p = parent_[static_cast<std::size_t>(p)];
      i = p;
    }
    return i;
  }
  void join(Eigen::Index a, Eigen::Index b)
  {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

private:
  std::vector<Eigen::Index> parent_;
};

} // namespace

DenseOperator::DenseOperator(Eigen::MatrixXcd m) : m_(std::move(m))
{
  if (m_.rows() != m_.cols()) throw std::invalid_argument("operator matrix is not square");
  sites_ = sites_for_dim(m_.rows());
}

DenseOperator DenseOperator::zero(int sites)
{
  const Eigen::Index dim = Eigen::Index{1} << sites;
  return DenseOperator(Eigen::MatrixXcd::Zero(dim, dim));
}

DenseOperator DenseOperator::identity(int sites)
{
  const Eigen::Index dim = Eigen::Index{1} << sites;
  return DenseOperator(Eigen::MatrixXcd::Identity(dim, dim));
}

double DenseOperator::max_norm() const
{
  return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff();
}

double DenseOperator::hermiticity_error() const
{
  double worst = 0.0;
  for (Eigen::Index c = 0; c < m_.cols(); ++c) {
    for (Eigen::Index r = 0; r <= c; ++r) worst = std::max(worst, std::abs(m_(r, c) - std::conj(m_(c, r))));
  }
  return worst;
}

double DenseOperator::unitarity_error() const
{
  Eigen::MatrixXcd g = m_.adjoint() * m_;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

bool DenseOperator::is_real() const
{
  for (Eigen::Index c = 0; c < m_.cols(); ++c) {
    for (Eigen::Index r = 0; r < m_.rows(); ++r) {
      if (m_(r, c).imag() != 0.0) return false;
    }
  }
  return true;
}

Eigen::MatrixXcd EigenDecomposition::vectors() const
{
  if (is_real()) return real_vectors.cast<cplx>();
  return complex_vectors;
}

DenseOperator materialize(const PauliStringOperator& op, int sites)
{
  if (sites < 1) throw std::invalid_argument("materialize needs at least one site");
  if (op.sites() != sites) {
    throw std::invalid_argument("operator strings have length " + std::to_string(op.sites()) + ", expected " +
                                std::to_string(sites));
  }
  check_dense_sites(sites);
  const Eigen::Index dim = Eigen::Index{1} << sites;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx i_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& [string, coeff] : op) {
    const auto xmask = string.x_mask();
    const auto zmask = string.z_mask();
    const cplx base = coeff * i_powers[string.y_count() & 3];
    // <x|P|y> is nonzero only for x = y ^ xmask; Z and Y contribute (-1)^bit
    for (Eigen::Index y = 0; y < dim; ++y) {
      const auto uy = static_cast<std::uint64_t>(y);
      const double sign = (std::popcount(uy & zmask) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(uy ^ xmask), y) += sign * base;
    }
  }
  DenseOperator out(std::move(m));
  double scale = 1.0;
  for (const auto& term : op) scale += std::abs(term.second);
  if (out.hermiticity_error() > 1e-12 * scale) throw std::logic_error("materialized operator is not Hermitian");
  return out;
}

EigenDecomposition hermitian_eig(const DenseOperator& a)
{
  const double tol = 1e-10 * std::max(1.0, a.max_norm());
  if (a.hermiticity_error() > tol) throw std::invalid_argument("hermitian_eig: input is not Hermitian");
  EigenDecomposition out;
  if (a.is_real()) {
    out.real_vectors = a.matrix().real();
    detail::syevd(out.real_vectors, out.values);
  } else {
    out.complex_vectors = a.matrix();
    detail::heevd(out.complex_vectors, out.values);
  }
  return out;
}

UnitaryDecomposition unitary_eig(const DenseOperator& u)
{
  const Eigen::MatrixXcd& um = u.matrix();
  const Eigen::Index dim = um.rows();
  const cplx rot = std::polar(1.0, kPhaseOffset);

  Eigen::MatrixXcd herm = 0.5 * (rot * um + std::conj(rot) * um.adjoint());
  double imag_max = 0.0;
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) imag_max = std::max(imag_max, std::abs(herm(r, c).imag()));
  }

  // D = V^dagger U V is diagonal up to blocks where cos(phi - theta) collides
  Eigen::MatrixXcd vectors;
  Eigen::MatrixXcd d;
  Eigen::VectorXd w;
  if (imag_max <= 1e-13) {
    Eigen::MatrixXd v = herm.real();
    herm.resize(0, 0);
    detail::syevd(v, w);
    Eigen::MatrixXd part = um.real();
    Eigen::MatrixXd tmp = v.transpose() * part;
    Eigen::MatrixXd d_re = tmp * v;
    part = um.imag();
    tmp.noalias() = v.transpose() * part;
    part.resize(0, 0);
    Eigen::MatrixXd d_im = tmp * v;
    tmp.resize(0, 0);
    d.resize(dim, dim);
    d.real() = d_re;
    d.imag() = d_im;
    vectors = v.cast<cplx>();
  } else {
    detail::heevd(herm, w);
    vectors = std::move(herm);
    d = vectors.adjoint() * um * vectors;
  }

  Components comps(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < c; ++r) {
      if (std::abs(d(r, c)) > kCouplingTolerance || std::abs(d(c, r)) > kCouplingTolerance) comps.join(r, c);
    }
  }
  std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) groups[static_cast<std::size_t>(comps.find(i))].push_back(i);

  Eigen::VectorXcd values = d.diagonal();
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    const auto m = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXcd block(m, m);
    Eigen::MatrixXcd cols(dim, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      cols.col(a) = vectors.col(g[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < m; ++b) block(a, b) = d(g[static_cast<std::size_t>(a)], g[static_cast<std::size_t>(b)]);
    }
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(block);
    const Eigen::MatrixXcd rotated = cols * schur.matrixU();
    for (Eigen::Index a = 0; a < m; ++a) {
      vectors.col(g[static_cast<std::size_t>(a)]) = rotated.col(a);
      values(g[static_cast<std::size_t>(a)]) = schur.matrixT()(a, a);
    }
  }
  d.resize(0, 0);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::vector<double> phase(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    values(i) /= std::abs(values(i));
    phase[static_cast<std::size_t>(i)] = principal_phase(values(i));
  }
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return phase[static_cast<std::size_t>(a)] < phase[static_cast<std::size_t>(b)];
  });

  UnitaryDecomposition out;
  out.values.resize(dim);
  out.vectors.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    out.values(i) = values(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

DenseOperator unitary_exp(const DenseOperator& h, double t)
{
  return unitary_exp(hermitian_eig(h), t);
}

DenseOperator unitary_exp(const EigenDecomposition& eig, double t)
{
  const Eigen::ArrayXd angle = -eig.values.array() * t;
  if (eig.is_real()) {
    const Eigen::MatrixXd& v = eig.real_vectors;
    Eigen::MatrixXd scaled = v * angle.cos().matrix().asDiagonal();
    Eigen::MatrixXd part = scaled * v.transpose();
    Eigen::MatrixXcd out(v.rows(), v.cols());
    out.real() = part;
    scaled = v * angle.sin().matrix().asDiagonal();
    part.noalias() = scaled * v.transpose();
    out.imag() = part;
    return DenseOperator(std::move(out));
  }
  const Eigen::VectorXcd phases = (angle.cast<cplx>() * cplx(0.0, 1.0)).exp().matrix();
  return DenseOperator(reconstruct(eig.complex_vectors, phases));
}

Eigen::MatrixXcd apply_unitary_exp(const EigenDecomposition& eig, double t, const Eigen::MatrixXcd& x)
{
  if (x.rows() != eig.dim()) throw std::invalid_argument("apply_unitary_exp: dimension mismatch");
  const Eigen::VectorXcd phases = ((-eig.values.array() * t).cast<cplx>() * cplx(0.0, 1.0)).exp().matrix();
  if (eig.is_real()) {
    const Eigen::MatrixXd& v = eig.real_vectors;
    Eigen::MatrixXcd y(x.rows(), x.cols());
    {
      Eigen::MatrixXd part = x.real();
      y.real() = v.transpose() * part;
      part = x.imag();
      y.imag() = v.transpose() * part;
    }
    y = phases.asDiagonal() * y;
    Eigen::MatrixXcd out(x.rows(), x.cols());
    Eigen::MatrixXd part = y.real();
    out.real() = v * part;
    part = y.imag();
    out.imag() = v * part;
    return out;
  }
  const Eigen::MatrixXcd& v = eig.complex_vectors;
  Eigen::MatrixXcd y = v.adjoint() * x;
  y = phases.asDiagonal() * y;
  return v * y;
}

double principal_phase(cplx lambda)
{
  double theta = -std::arg(lambda);
  if (theta <= -pi + kBranchSnap) theta = pi;
  return theta;
}

Eigen::VectorXd quasi_energies(const UnitaryDecomposition& eig, double period)
{
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  Eigen::VectorXd out(eig.dim());
  for (Eigen::Index i = 0; i < eig.dim(); ++i) out(i) = principal_phase(eig.values(i)) / period;
  return out;
}

DenseOperator principal_log(const DenseOperator& u, double period)
{
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  if (u.unitarity_error() > 1e-10) throw std::invalid_argument("principal_log: input is not unitary");
  return principal_log(unitary_eig(u), period);
}

DenseOperator principal_log(const UnitaryDecomposition& eig, double period)
{
  const Eigen::VectorXcd energies = quasi_energies(eig, period).cast<cplx>();
  Eigen::MatrixXcd h = reconstruct(eig.vectors, energies);
  // exact Hermitian symmetrization of rounding noise
  h = (0.5 * (h + h.adjoint())).eval();
  return DenseOperator(std::move(h));
}

Eigen::MatrixXcd reconstruct(const Eigen::MatrixXcd& vectors, const Eigen::VectorXcd& values)
{
  Eigen::MatrixXcd scaled = vectors * values.asDiagonal();
  return scaled * vectors.adjoint();
}

} // namespace qbattery
