#include <cmath>
#include <random>

#include "doctest.h"
#include "molgec/tridiag.hpp"

using namespace molgec;
using doctest::Approx;

TEST_CASE("zero shift is the identity") {
  Tridiag a(3);
  a.diag(0) = 5.0;
  a.upper(0) = 2.0;
  a.lower(2) = -1.0;
  const std::vector<double> rhs{1.0, -2.0, 3.0};
  CHECK(solve_shifted(a, 0.0, rhs) == rhs);
}

TEST_CASE("two by two shifted solve") {
  Tridiag a(2);
  a.upper(0) = 1.0;
  a.lower(1) = 1.0;
  const auto w = solve_shifted(a, 0.5, std::vector<double>{1.0, 0.0});
  CHECK(w[0] == Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("random diagonally dominant system") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 50;
  Tridiag a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.diag(i) = -4.0 + u(rng);
    if (i > 0) a.lower(i) = u(rng);
    if (i + 1 < n) a.upper(i) = u(rng);
  }
  std::vector<double> rhs(n);
  for (auto& r : rhs) r = u(rng);
  const double c = 0.37;
  const ShiftedSolver lu(a, c);
  const auto w = lu.solve(rhs);
  const auto aw = a.apply(w);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(w[i] - c * aw[i] - rhs[i]));
  CHECK(res <= 1e-12);

  std::vector<double> in_place(rhs);
  lu.solve_in_place(in_place);
  CHECK(in_place == w);
}

TEST_CASE("zero pivot reports its row") {
  Tridiag a(3);
  a.diag(0) = 1.0;  // I - 1*A has a zero first pivot
  try {
    (void)solve_shifted(a, 1.0, std::vector<double>{1.0, 1.0, 1.0});
    FAIL("expected a singular system");
  } catch (const SingularSystemError& e) {
    CHECK(e.pivot() == 0);
  }
}
