#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "qbattery/magnus.hpp"

using namespace qbattery;
using namespace qbattery::magnus;

namespace {

DriveParams couplings(int N, double T, double h0 = 0.3, Boundary b = Boundary::periodic)
{
  DriveParams p;
  p.h_z = 2.0;
  p.J0 = 0.5;
  p.h0 = h0;
  p.omega = 2.0 * pi / T;
  p.N = N;
  p.boundary = b;
  return p;
}

Eigen::MatrixXcd dense(const PauliStringOperator& op, int N)
{
  return materialize(op, N).matrix();
}

// Homogeneous parts of log(e^X e^Y) of degree 1..4 in (X, Y).
std::array<Eigen::MatrixXcd, 4> bch(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y)
{
  using oracle::comm;
  return {x + y, 0.5 * comm(x, y), (comm(x, comm(x, y)) + comm(y, comm(y, x))) / 12.0,
          -comm(y, comm(x, comm(x, y))) / 24.0};
}

} // namespace

TEST_CASE("no drive leaves only the battery term")
{
  DriveParams p = couplings(5, 0.3);
  p.J0 = 0.0;
  p.h0 = 0.0;
  for (int order = 0; order <= 3; ++order) CHECK(magnus_floquet(p, order) == site_sum("Z", 5, p.boundary, 2.0));
  CHECK_THROWS_AS(magnus_floquet(p, 4), std::invalid_argument);
  CHECK_THROWS_AS(magnus_floquet(p, -1), std::invalid_argument);
}

TEST_CASE("term structure without the longitudinal field")
{
  const double T = 0.2;
  const DriveParams p = couplings(6, T, 0.0);
  const PauliStringOperator h2 = magnus_floquet(p, 2);
  CHECK(h2.coefficient("YIIIII") == 0.0);
  CHECK(h2.coefficient("ZXIIII") == 0.0);
  CHECK(h2.coefficient("XZIIII") == 0.0);
  CHECK(h2.coefficient("XZXIII") == doctest::Approx(-T * T / 3.0 * 0.25 * 2.0));
  // every term odd in h0 vanishes at the string level
  const MagnusExpansion e = expand(p);
  for (int order = 0; order <= 3; ++order) {
    for (const auto& [s, c] : e.brackets[static_cast<std::size_t>(order)]) {
      CAPTURE(s.to_string());
      CHECK(s.y_count() % 2 == 0 + (order % 2)); // Y count parity tracks the order at h0 = 0
      CHECK(s.to_string().find("XYX") == std::string::npos);
    }
  }
}

TEST_CASE("order-3 term inventory on six periodic sites")
{
  const MagnusExpansion e = expand(couplings(6, 0.1));
  std::set<std::string> allowed;
  for (const auto* pattern : {"XY", "YX", "Y", "XYX"}) {
    for (const auto& [s, c] : site_sum(pattern, 6, Boundary::periodic)) allowed.insert(s.to_string());
  }
  std::set<std::string> seen;
  for (const auto& [s, c] : e.brackets[3]) {
    CHECK(allowed.count(s.to_string()) == 1);
    seen.insert(s.to_string());
  }
  CHECK(seen == allowed);
}

TEST_CASE("every order is Hermitian once materialized")
{
  const MagnusExpansion e = expand(couplings(6, 0.17, 0.3, Boundary::open));
  for (int order = 0; order <= 3; ++order) CHECK(materialize(e.term(order), 6).hermiticity_error() <= 1e-14);
}

TEST_CASE("commutator oracle examples")
{
  const PauliStringOperator hb = site_sum("Z", 4, Boundary::periodic, 2.0);
  CHECK(commutator_oracle(hb, hb, 4).max_norm() == 0.0);

  const Eigen::MatrixXcd c = commutator_oracle(site_sum("Z", 3, Boundary::open), site_sum("XX", 3, Boundary::open), 3)
                                 .matrix();
  const Eigen::MatrixXcd expected =
      cplx(0, 2) * (oracle::sum_two(3, 'Y', 'X', false) + oracle::sum_two(3, 'X', 'Y', false));
  CHECK(oracle::max_abs(c - expected) <= 1e-14);

  CHECK_THROWS_AS(commutator_oracle(site_sum("Z", 9, Boundary::open), site_sum("Z", 9, Boundary::open), 9),
                  GuardError);
}

TEST_CASE("nested integrals of the square pulse")
{
  const int N = 4;
  const double T = 0.7;
  const Eigen::MatrixXcd h1 = oracle::drive_hamiltonian(N, 2.0, 0.5, 0.3, true, +1);
  const Eigen::MatrixXcd h2 = oracle::drive_hamiltonian(N, 2.0, 0.5, 0.3, true, -1);
  // only t1 in the second half and t2 in the first contribute
  CHECK(oracle::max_abs(nested_integral(h1, h2, T, 1) - T / 4.0 * oracle::comm(h2, h1)) <= 1e-13);
  // a constant drive has no commutator terms
  for (int order = 1; order <= 3; ++order) CHECK(oracle::max_abs(nested_integral(h1, h1, T, order)) <= 1e-12);
  CHECK_THROWS_AS(nested_integral(h1, h2, T, 4), std::invalid_argument);
  CHECK_THROWS_AS(nested_integral(h1, h2, 0.0, 1), std::invalid_argument);
}

TEST_CASE("truncated expansion equals the nested-commutator series on a ring")
{
  const int N = 4;
  for (Boundary b : {Boundary::periodic, Boundary::open}) {
    const DriveParams p = couplings(N, 0.37, 0.3, b);
    const double T = p.period();
    const bool periodic = b == Boundary::periodic;
    const Eigen::MatrixXcd h1 = oracle::drive_hamiltonian(N, 2.0, 0.5, 0.3, periodic, +1);
    const Eigen::MatrixXcd h2 = oracle::drive_hamiltonian(N, 2.0, 0.5, 0.3, periodic, -1);
    const cplx i(0, 1);
    const Eigen::MatrixXcd series[4] = {0.5 * (h1 + h2), -0.5 * i * nested_integral(h1, h2, T, 1),
                                        -nested_integral(h1, h2, T, 2) / 6.0,
                                        i / 12.0 * nested_integral(h1, h2, T, 3)};
    const MagnusExpansion e = expand(p);
    for (int order = 0; order <= 3; ++order) {
      CAPTURE(order);
      CAPTURE(periodic);
      const Eigen::MatrixXcd term = dense(e.term(order), N);
      const double diff = oracle::max_abs(term - series[order]);
      if (periodic || order < 2) {
        CHECK(diff <= 1e-12 * std::max(1.0, oracle::max_abs(term)));
      } else {
        // the closed-form brackets are translation invariant; open ends miss edge corrections
        CHECK(diff > 1e-6);
      }
    }
  }
}

TEST_CASE("truncated expansion equals the BCH series of the two half-period exponentials")
{
  const int N = 4;
  const DriveParams p = couplings(N, 0.29);
  const double T = p.period();
  const cplx i(0, 1);
  const Eigen::MatrixXcd h1 = oracle::drive_hamiltonian(N, 2.0, 0.5, 0.3, true, +1);
  const Eigen::MatrixXcd h2 = oracle::drive_hamiltonian(N, 2.0, 0.5, 0.3, true, -1);
  // U = e^X e^Y with X = -i H2 T/2 (later), Y = -i H1 T/2; H_F = (i/T) log U
  const auto parts = bch(-i * h2 * (T / 2), -i * h1 * (T / 2));
  const MagnusExpansion e = expand(p);
  for (int order = 0; order <= 3; ++order) {
    CAPTURE(order);
    const Eigen::MatrixXcd term = dense(e.term(order), N);
    CHECK(oracle::max_abs(term - i / T * parts[order]) <= 1e-12 * std::max(1.0, oracle::max_abs(term)));
  }
}

TEST_CASE("magnus_error behaviour")
{
  DriveParams free = couplings(6, 0.05);
  free.J0 = 0.0;
  free.h0 = 0.0;
  for (int order = 0; order <= 3; ++order) CHECK(magnus_error(free, order) <= 1e-13);

  const std::vector<int> orders = {0, 1, 2, 3};
  const auto errs = magnus_errors(couplings(6, 0.05), orders);
  for (int order = 1; order <= 3; ++order) CHECK(errs[order] < errs[order - 1]);
  CHECK(magnus_error(couplings(6, 0.05), 2) == errs[2]);

  std::vector<double> third;
  for (double T : {0.05, 0.025, 0.0125}) third.push_back(magnus_error(couplings(6, T), 3));
  CHECK(third[0] / third[1] == doctest::Approx(16.0).epsilon(0.2));
  CHECK(third[1] / third[2] == doctest::Approx(16.0).epsilon(0.2));

  CHECK_THROWS_AS(magnus_error(couplings(6, 0.5), 3), GuardError);
  CHECK_THROWS_AS(magnus_error(couplings(11, 0.01), 3), GuardError);
  CHECK(phase_bound(couplings(6, 0.1)) == doctest::Approx(0.1 * (6 * 2.0 + 6 * 0.5 + 6 * 0.3)));
}
