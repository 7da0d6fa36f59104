#include <doctest.h>

#include <bit>
#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "qbattery/dense.hpp"

using namespace qbattery;

namespace {

Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& rng, bool real)
{
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) a(r, c) = cplx(g(rng), real ? 0.0 : g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

Eigen::MatrixXcd random_unitary(int dim, std::mt19937_64& rng)
{
  return oracle::expm(random_hermitian(dim, rng, false), 1.0);
}

void check_decomposition(const UnitaryDecomposition& eig, const Eigen::MatrixXcd& u)
{
  const Eigen::Index dim = u.rows();
  CHECK(oracle::max_abs(eig.vectors.adjoint() * eig.vectors - Eigen::MatrixXcd::Identity(dim, dim)) <= 1e-12);
  CHECK(oracle::max_abs(reconstruct(eig.vectors, eig.values) - u) <= 1e-10 * std::max(1.0, oracle::max_abs(u)));
  for (Eigen::Index i = 0; i < dim; ++i) CHECK(std::abs(std::abs(eig.values(i)) - 1.0) <= 1e-12);
  for (Eigen::Index i = 1; i < dim; ++i) CHECK(principal_phase(eig.values(i - 1)) <= principal_phase(eig.values(i)));
}

struct ScopedEnv {
  explicit ScopedEnv(const char* value) { setenv("QBATTERY_MAX_N", value, 1); }
  ~ScopedEnv() { unsetenv("QBATTERY_MAX_N"); }
};

} // namespace

TEST_CASE("materialize: single Z and empty operator")
{
  PauliStringOperator z(1);
  z.add("Z", 2.0);
  Eigen::MatrixXcd expected(2, 2);
  expected << 2, 0, 0, -2;
  CHECK(oracle::max_abs(materialize(z, 1).matrix() - expected) == 0.0);

  const DenseOperator zero = materialize(PauliStringOperator(2), 2);
  CHECK(zero.dim() == 4);
  CHECK(zero.max_norm() == 0.0);
}

TEST_CASE("materialize: H1 on three open sites matches Kronecker products")
{
  const double h_z = 2.0, J0 = 0.5, h0 = 0.3;
  const PauliStringOperator h1 = site_sum("Z", 3, Boundary::open, h_z) + site_sum("XX", 3, Boundary::open, J0) +
                                 site_sum("X", 3, Boundary::open, h0);
  const Eigen::MatrixXcd m = materialize(h1, 3).matrix();
  CHECK(oracle::max_abs(m - oracle::drive_hamiltonian(3, h_z, J0, h0, false, +1)) <= 1e-14);
  CHECK(std::abs(m.trace()) <= 1e-14);
  for (int x = 0; x < 8; ++x) {
    const int ups = 3 - std::popcount(static_cast<unsigned>(x)); // bit set = spin down
    CHECK(m(x, x).real() == doctest::Approx(h_z * (ups - (3 - ups))));
  }
}

TEST_CASE("materialize: rejects mismatched lengths and oversized chains")
{
  CHECK_THROWS_AS(materialize(site_sum("Z", 3, Boundary::open), 4), std::invalid_argument);
  ScopedEnv env("5");
  CHECK(max_dense_sites() == 5);
  CHECK_THROWS_AS(materialize(site_sum("Z", 6, Boundary::open), 6), GuardError);
}

TEST_CASE("dense operator dimension must be a power of two")
{
  CHECK_THROWS_AS(DenseOperator(Eigen::MatrixXcd::Identity(3, 3)), std::invalid_argument);
  CHECK(DenseOperator::identity(3).sites() == 3);
}

TEST_CASE("hermitian_eig: documented examples")
{
  SUBCASE("diagonal")
  {
    PauliStringOperator z(1);
    z.add("Z", 2.0);
    const EigenDecomposition e = hermitian_eig(materialize(z, 1));
    CHECK(e.values(0) == doctest::Approx(-2.0));
    CHECK(e.values(1) == doctest::Approx(2.0));
  }
  SUBCASE("sigma x")
  {
    PauliStringOperator x(1);
    x.add("X", 1.0);
    const EigenDecomposition e = hermitian_eig(materialize(x, 1));
    CHECK(e.values(0) == doctest::Approx(-1.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    const Eigen::MatrixXcd v = e.vectors();
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(v(0, 1)) - s) < 1e-14);
    CHECK(std::abs(v(0, 1) - v(1, 1)) < 1e-14);  // (|0> + |1>)/sqrt 2 up to phase
    CHECK(std::abs(v(0, 0) + v(1, 0)) < 1e-14);  // (|0> - |1>)/sqrt 2 up to phase
  }
  SUBCASE("battery Hamiltonian on four sites")
  {
    const EigenDecomposition e = hermitian_eig(materialize(site_sum("Z", 4, Boundary::open, 2.0), 4));
    const double expected[] = {-8, -4, -4, -4, -4, 0, 0, 0, 0, 0, 0, 4, 4, 4, 4, 8};
    for (int i = 0; i < 16; ++i) CHECK(e.values(i) == doctest::Approx(expected[i]));
  }
}

TEST_CASE("hermitian_eig: reconstruction and orthonormality on random input")
{
  std::mt19937_64 rng(3);
  for (bool real : {true, false}) {
    for (int dim : {2, 16, 64}) {
      const Eigen::MatrixXcd a = random_hermitian(dim, rng, real);
      const EigenDecomposition e = hermitian_eig(DenseOperator(a));
      CHECK(e.is_real() == real);
      const Eigen::MatrixXcd v = e.vectors();
      CHECK(oracle::max_abs(v.adjoint() * v - Eigen::MatrixXcd::Identity(dim, dim)) <= 1e-12);
      CHECK(oracle::max_abs(v * e.values.cast<cplx>().asDiagonal() * v.adjoint() - a) <= 1e-10 * oracle::max_abs(a));
      for (int i = 1; i < dim; ++i) CHECK(e.values(i - 1) <= e.values(i));
    }
  }
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(DenseOperator(bad)), std::invalid_argument);
}

TEST_CASE("unitary_exp: trivial cases")
{
  const DenseOperator h = materialize(site_sum("XX", 3, Boundary::periodic, 0.7), 3);
  CHECK(oracle::max_abs(unitary_exp(h, 0.0).matrix() - Eigen::MatrixXcd::Identity(8, 8)) <= 1e-14);

  PauliStringOperator z(1);
  z.add("Z", 2.0);
  CHECK(oracle::max_abs(unitary_exp(materialize(z, 1), pi / 2).matrix() + Eigen::MatrixXcd::Identity(2, 2)) <= 1e-14);
}

TEST_CASE("unitary_exp: small-t Taylor series and Pade oracle")
{
  const Eigen::MatrixXcd h1 = oracle::drive_hamiltonian(4, 2.0, 0.5, 0.3, true, +1);
  const DenseOperator h(h1);
  const double t = 1e-3;
  CHECK(oracle::max_abs(unitary_exp(h, t).matrix() - oracle::taylor(h1, t, 4)) <= 1e-10);
  const double half_period = pi / 2.0;
  CHECK(oracle::max_abs(unitary_exp(h, half_period).matrix() - oracle::expm(h1, half_period)) <= 1e-11);

  std::mt19937_64 rng(5);
  const Eigen::MatrixXcd c = random_hermitian(16, rng, false);
  CHECK(oracle::max_abs(unitary_exp(DenseOperator(c), 0.7).matrix() - oracle::expm(c, 0.7)) <= 1e-11);
}

TEST_CASE("unitary_exp: unitary up to ten sites")
{
  for (int N : {2, 6, 10}) {
    const PauliStringOperator h = site_sum("Z", N, Boundary::periodic, 2.0) +
                                  site_sum("XX", N, Boundary::periodic, 0.5) + site_sum("X", N, Boundary::periodic, 0.3);
    CAPTURE(N);
    CHECK(unitary_exp(materialize(h, N), 1.3).unitarity_error() <= 1e-12);
  }
}

TEST_CASE("apply_unitary_exp equals the formed exponential")
{
  std::mt19937_64 rng(9);
  for (bool real : {true, false}) {
    const DenseOperator h(random_hermitian(32, rng, real));
    const EigenDecomposition e = hermitian_eig(h);
    const Eigen::MatrixXcd x = random_unitary(32, rng);
    CHECK(oracle::max_abs(apply_unitary_exp(e, 0.4, x) - unitary_exp(e, 0.4).matrix() * x) <= 1e-12);
  }
}

TEST_CASE("principal_log: branch conventions")
{
  CHECK(principal_log(DenseOperator::identity(2), 1.0).max_norm() <= 1e-15);

  const DenseOperator minus(-Eigen::MatrixXcd::Identity(4, 4));
  CHECK(oracle::max_abs(principal_log(minus, 1.0).matrix() - pi * Eigen::MatrixXcd::Identity(4, 4)) <= 1e-14);
  CHECK(principal_phase(cplx(-1.0, 0.0)) == pi);
  CHECK(principal_phase(cplx(-1.0, -0.0)) == pi);
  CHECK(principal_phase(std::polar(1.0, pi - 1e-14)) == pi);

  const DenseOperator hb = materialize(site_sum("Z", 2, Boundary::open, 2.0), 2);
  const double T = 0.1;
  CHECK(oracle::max_abs(principal_log(unitary_exp(hb, T), T).matrix() - hb.matrix()) <= 1e-12);

  Eigen::MatrixXcd scaled = Eigen::MatrixXcd::Identity(2, 2) * 1.1;
  CHECK_THROWS_AS(principal_log(DenseOperator(scaled), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(principal_log(DenseOperator::identity(1), 0.0), std::invalid_argument);
}

TEST_CASE("principal_log round trip inside the branch")
{
  std::mt19937_64 rng(17);
  for (bool real : {true, false}) {
    for (int dim : {4, 32, 128}) {
      Eigen::MatrixXcd h = random_hermitian(dim, rng, real);
      const EigenDecomposition e = hermitian_eig(DenseOperator(h));
      const double spread = std::max(std::abs(e.values(0)), std::abs(e.values(dim - 1)));
      const double T = 0.9 * pi / spread;
      const DenseOperator back = principal_log(unitary_exp(DenseOperator(h), T), T);
      CAPTURE(dim);
      CHECK(oracle::max_abs(back.matrix() - h) <= 1e-9);
      CHECK(back.hermiticity_error() == 0.0);
    }
  }
}

TEST_CASE("unitary_eig: generic, degenerate and symmetric spectra")
{
  std::mt19937_64 rng(23);
  SUBCASE("generic")
  {
    const Eigen::MatrixXcd u = random_unitary(64, rng);
    check_decomposition(unitary_eig(DenseOperator(u)), u);
  }
  SUBCASE("degenerate phases in a random basis")
  {
    const Eigen::MatrixXcd q = random_unitary(32, rng);
    Eigen::VectorXcd lam(32);
    for (int i = 0; i < 32; ++i) lam(i) = std::polar(1.0, 0.5 * (i % 4)); // fourfold degenerate
    const Eigen::MatrixXcd u = q * lam.asDiagonal() * q.adjoint();
    check_decomposition(unitary_eig(DenseOperator(u)), u);
  }
  SUBCASE("phases mirrored about the internal offset")
  {
    // pairs theta, 2 phi - theta collide in cos(phi - theta)
    const double phi = 0.7390851332151607;
    const Eigen::MatrixXcd q = random_unitary(16, rng);
    Eigen::VectorXcd lam(16);
    for (int i = 0; i < 8; ++i) {
      const double theta = 0.3 * i - 1.0;
      lam(2 * i) = std::polar(1.0, -theta);
      lam(2 * i + 1) = std::polar(1.0, -(2 * phi - theta));
    }
    const Eigen::MatrixXcd u = q * lam.asDiagonal() * q.adjoint();
    check_decomposition(unitary_eig(DenseOperator(u)), u);
  }
  SUBCASE("minus identity and complex symmetric input")
  {
    const Eigen::MatrixXcd minus = -Eigen::MatrixXcd::Identity(8, 8);
    const UnitaryDecomposition e = unitary_eig(DenseOperator(minus));
    check_decomposition(e, minus);
    for (int i = 0; i < 8; ++i) CHECK(principal_phase(e.values(i)) == pi);

    const Eigen::MatrixXcd h = random_hermitian(32, rng, true);
    const Eigen::MatrixXcd sym = oracle::expm(h, 0.8); // real symmetric generator: U = U^T
    check_decomposition(unitary_eig(DenseOperator(sym)), sym);
  }
}
