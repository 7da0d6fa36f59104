#pragma once

// Reference constructions that share no code with the library: explicit
// Kronecker products, Eigen's Pade matrix exponential and plain series.

#include <map>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;

inline Eigen::Matrix2cd pauli(char label)
{
  Eigen::Matrix2cd m;
  switch (label) {
  case 'X': m << 0, 1, 1, 0; break;
  case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
  case 'Z': m << 1, 0, 0, -1; break;
  default: m.setIdentity();
  }
  return m;
}

/// sigma^{labels[0]} (x) sigma^{labels[1]} (x) ...
inline Eigen::MatrixXcd kron(const std::string& labels)
{
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : labels) {
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(m, pauli(c)).eval();
    m = next;
  }
  return m;
}

/// Single operator `op` on `site` of an N-site chain, identity elsewhere.
inline Eigen::MatrixXcd on_sites(int N, std::map<int, char> ops)
{
  std::string labels(static_cast<std::size_t>(N), 'I');
  for (auto [site, c] : ops) labels[static_cast<std::size_t>(site % N)] = c;
  return kron(labels);
}

inline Eigen::MatrixXcd sum_one(int N, char a)
{
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1 << N, 1 << N);
  for (int j = 0; j < N; ++j) m += on_sites(N, {{j, a}});
  return m;
}

inline Eigen::MatrixXcd sum_two(int N, char a, char b, bool periodic)
{
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1 << N, 1 << N);
  const int bonds = periodic ? N : N - 1;
  for (int j = 0; j < bonds; ++j) m += on_sites(N, {{j, a}, {j + 1, b}});
  return m;
}

inline Eigen::MatrixXcd sum_three(int N, char a, char b, char c, bool periodic)
{
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1 << N, 1 << N);
  const int starts = periodic ? N : N - 2;
  for (int j = 0; j < starts; ++j) m += on_sites(N, {{j, a}, {j + 1, b}, {j + 2, c}});
  return m;
}

/// h_z sum Z +- (J0 sum XX + h0 sum X)
inline Eigen::MatrixXcd drive_hamiltonian(int N, double h_z, double J0, double h0, bool periodic, int sign)
{
  return h_z * sum_one(N, 'Z') + sign * (J0 * sum_two(N, 'X', 'X', periodic) + h0 * sum_one(N, 'X'));
}

/// exp(-i H t) by scaling and squaring (Eigen's Pade implementation).
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& h, double t)
{
  const Eigen::MatrixXcd a = (cplx(0, -t) * h).eval();
  return a.exp();
}

/// sum_{k<=order} (-i H t)^k / k!
inline Eigen::MatrixXcd taylor(const Eigen::MatrixXcd& h, double t, int order)
{
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= order; ++k) {
    term = (cplx(0, -t) / static_cast<double>(k)) * (h * term);
    sum += term;
  }
  return sum;
}

inline Eigen::MatrixXcd comm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
  return a * b - b * a;
}

inline double max_abs(const Eigen::MatrixXcd& m)
{
  return m.cwiseAbs().maxCoeff();
}

} // namespace oracle
