#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "molgec/spatial.hpp"

using namespace molgec;
using doctest::Approx;

namespace {

ProblemSpec pure_diffusion(double (*u)(double)) {
  ProblemSpec s;
  s.name = "diffusion";
  s.domain = {0.0, 1.0};
  s.rhs = [](double, double, double, double, double q) { return q; };
  s.partials = [](double, double, double, double, double) { return RhsPartials{0.0, 0.0, 1.0}; };
  s.left = [u](double) { return u(0.0); };
  s.right = [u](double) { return u(1.0); };
  s.initial = u;
  return s;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("stencils are exact for quadratics") {
  for (auto [hl, hr] : {std::pair{0.1, 0.1}, std::pair{0.1, 0.2}, std::pair{0.3, 0.15}}) {
    const auto d1 = first_derivative_stencil(hl, hr);
    const auto d2 = second_derivative_stencil(hl, hr);
    const double x = 0.7;
    auto f = [](double y) { return 3.0 - y + 2.5 * y * y; };
    const double a = f(x - hl), b = f(x), c = f(x + hr);
    CHECK(d1.left * a + d1.center * b + d1.right * c == Approx(-1.0 + 5.0 * x));
    CHECK(d2.left * a + d2.center * b + d2.right * c == Approx(5.0));
  }
}

TEST_CASE("constant and quadratic data") {
  const auto heat = make_benchmark(BenchmarkId::heat_neumann);
  const auto m = Mesh::uniform({0.0, 1.0}, 10, BoundaryKind::neumann);

  SUBCASE("neumann boundary node eliminates the ghost value") {
    const auto f = apply_rhs(heat, m, 0.0, std::vector<double>(11, 0.0));
    CHECK(f.front() == Approx(-62.83185307179586).epsilon(1e-12));
    CHECK(f[5] == 0.0);
  }
  SUBCASE("interior second difference of a constant") {
    const auto f = apply_rhs(heat, m, 0.0, std::vector<double>(11, 1.0));
    for (std::size_t i = 1; i + 1 < f.size(); ++i) CHECK(f[i] == Approx(0.0).scale(1.0));
  }
  SUBCASE("x squared on a graded mesh") {
    const auto s = pure_diffusion([](double x) { return x * x; });
    const Mesh g({0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.8, 0.9, 1.0}, BoundaryKind::dirichlet);
    std::vector<double> v;
    for (double x : g.unknown_coordinates()) v.push_back(x * x);
    for (double f : apply_rhs(s, g, 0.0, v)) CHECK(f == Approx(2.0).epsilon(1e-11));
  }
}

TEST_CASE("jacobian of pure diffusion") {
  const auto s = pure_diffusion([](double) { return 0.0; });
  const auto m = Mesh::uniform({0.0, 1.0}, 8, BoundaryKind::dirichlet);
  const auto a = jacobian(s, m, 0.0, std::vector<double>(7, 0.3));
  const double h2 = 1.0 / 64.0;
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(a.diag(i) == Approx(-2.0 / h2));
    if (i > 0) CHECK(a.lower(i) == Approx(1.0 / h2));
    if (i + 1 < 7) CHECK(a.upper(i) == Approx(1.0 / h2));
  }
}

TEST_CASE("jacobian of a source-only problem vanishes") {
  ProblemSpec s = pure_diffusion([](double) { return 0.0; });
  s.rhs = [](double t, double x, double, double, double) { return t + x; };
  s.partials = [](double, double, double, double, double) { return RhsPartials{}; };
  const auto m = Mesh::uniform({0.0, 1.0}, 6, BoundaryKind::dirichlet);
  const auto a = jacobian(s, m, 0.0, std::vector<double>(5, 1.0));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.lower(i) == 0.0);
    CHECK(a.diag(i) == 0.0);
    CHECK(a.upper(i) == 0.0);
  }
}

TEST_CASE("jacobian-vector product matches a directional difference") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const auto& name : benchmark_names()) {
    INFO(name);
    const auto s = make_benchmark(name);
    const auto pair = MeshPair::uniform(s.domain, 41, s.bc);
    // a graded mesh exercises the non-uniform stencils as well
    const auto graded = adapt_coarse_mesh(pair, {{1, 3, 5}, {}});
    for (const Mesh* m : {&pair.fine(), &graded.fine()}) {
      const std::size_t n = m->unknown_count();
      std::vector<double> v(n), w(n);
      for (auto& x : v) x = 0.5 + 0.4 * unit(rng);
      for (auto& x : w) x = unit(rng);
      const double wn = norm(w);
      for (auto& x : w) x /= wn;
      const double t = 0.3 * s.horizon, d = 1e-6;
      std::vector<double> vd(v);
      for (std::size_t i = 0; i < n; ++i) vd[i] += d * w[i];
      const auto f0 = apply_rhs(s, *m, t, v);
      const auto f1 = apply_rhs(s, *m, t, vd);
      const auto aw = jacobian(s, *m, t, v).apply(w);
      std::vector<double> diff(n);
      for (std::size_t i = 0; i < n; ++i) diff[i] = (f1[i] - f0[i]) / d - aw[i];
      CHECK(norm(diff) <= 1e-5 * norm(aw));
    }
  }
}

TEST_CASE("mol system wraps the free functions") {
  const auto s = make_benchmark(BenchmarkId::burgers);
  const auto m = Mesh::uniform(s.domain, 20, s.bc);
  const MolSystem sys(s, m);
  const auto v = initial_restriction(s, m);
  CHECK(sys.size() == 19);
  CHECK(sys.rhs(0.2, v) == apply_rhs(s, m, 0.2, v));
  // dF/dt comes only from the time-dependent boundary data here
  const auto ft = sys.rhs_time_derivative(0.2, v);
  const auto fp = apply_rhs(s, m, 0.2 + 1e-5, v);
  const auto fm = apply_rhs(s, m, 0.2 - 1e-5, v);
  CHECK(ft.front() == Approx((fp.front() - fm.front()) / 2e-5).epsilon(1e-4));
}
