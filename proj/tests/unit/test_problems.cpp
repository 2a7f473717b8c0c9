#include <cmath>
#include <numbers>

#include "doctest.h"
#include "molgec/problems.hpp"

using namespace molgec;
using doctest::Approx;

TEST_CASE("benchmark registry") {
  CHECK(benchmark_names() == std::vector<std::string>{"heat_neumann", "burgers", "allen_cahn"});
  for (const auto& name : benchmark_names()) {
    const auto id = parse_benchmark(name);
    REQUIRE(id);
    CHECK(benchmark_name(*id) == name);
    CHECK(make_benchmark(name).name == name);
  }
  CHECK_FALSE(parse_benchmark("wave"));
  CHECK_THROWS(make_benchmark("wave"));
}

TEST_CASE("exact solutions") {
  const auto heat = make_benchmark(BenchmarkId::heat_neumann);
  CHECK(heat.exact(0.0, 0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(heat.bc == BoundaryKind::neumann);

  const auto ac = make_benchmark(BenchmarkId::allen_cahn);
  const double speed = 1.5 * std::sqrt(2.0);
  for (double t : {0.0, 0.1, 0.37}) CHECK(ac.exact(t, speed * t) == Approx(0.5).epsilon(1e-12));

  const auto bu = make_benchmark(BenchmarkId::burgers);
  CHECK(bu.exact(0.0, 0.0) == Approx(0.9923490851667619).epsilon(1e-14));
  // far-field values stay finite and bounded by the plateau levels
  CHECK(std::isfinite(bu.exact(1.0, 1.0)));
  CHECK(bu.exact(1.0, 1.0) >= 0.1 - 1e-12);
}

TEST_CASE("initial and boundary data agree with the exact solution") {
  for (const auto& name : benchmark_names()) {
    const auto s = make_benchmark(name);
    INFO(name);
    const double a = s.domain.left, b = s.domain.right;
    for (double x : {a, 0.3 * a + 0.7 * b, b}) CHECK(s.initial(x) == Approx(s.exact(0.0, x)));
    if (s.bc == BoundaryKind::dirichlet) {
      for (double t : {0.0, 0.5 * s.horizon, s.horizon}) {
        CHECK(s.left(t) == Approx(s.exact(t, a)));
        CHECK(s.right(t) == Approx(s.exact(t, b)));
      }
    }
  }
}

TEST_CASE("heat flux data match the derivative of the exact solution") {
  const auto s = make_benchmark(BenchmarkId::heat_neumann);
  const double d = 1e-6;
  for (double t : {0.0, 0.1}) {
    CHECK(s.left(t) == Approx((s.exact(t, d) - s.exact(t, -d)) / (2 * d)).epsilon(1e-6));
    CHECK(s.right(t) == Approx((s.exact(t, 1 + d) - s.exact(t, 1 - d)) / (2 * d)).epsilon(1e-6));
  }
}

TEST_CASE("partials agree with finite differences of the right-hand side") {
  for (const auto& name : benchmark_names()) {
    const auto s = make_benchmark(name);
    INFO(name);
    const double t = 0.1, x = 0.4, u = 0.3, p = -1.7, q = 2.2, d = 1e-6;
    const auto j = s.partials(t, x, u, p, q);
    CHECK(j.du == Approx((s.rhs(t, x, u + d, p, q) - s.rhs(t, x, u - d, p, q)) / (2 * d)).epsilon(1e-6));
    CHECK(j.dp == Approx((s.rhs(t, x, u, p + d, q) - s.rhs(t, x, u, p - d, q)) / (2 * d)).epsilon(1e-6));
    CHECK(j.ds == Approx((s.rhs(t, x, u, p, q + d) - s.rhs(t, x, u, p, q - d)) / (2 * d)).epsilon(1e-6));
  }
}

TEST_CASE("exact restriction samples the unknowns") {
  const auto s = make_benchmark(BenchmarkId::heat_neumann);
  const auto m = Mesh::uniform(s.domain, 10, s.bc);
  const auto v = exact_restriction(s, m, 0.0);
  REQUIRE(v.size() == 11);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == Approx(std::sin(std::numbers::pi * m.node(i))));
  CHECK(initial_restriction(s, m) == v);
}

TEST_CASE("boundary fill") {
  const auto s = make_benchmark(BenchmarkId::burgers);
  const auto m = Mesh::uniform(s.domain, 4, s.bc);
  const std::vector<double> v{1.0, 2.0, 3.0};
  const auto all = with_boundary(s, m, 0.0, v);
  REQUIRE(all.size() == 5);
  CHECK(all.front() == Approx(s.left(0.0)));
  CHECK(all[2] == 2.0);
  CHECK(with_boundary(s, m, 0.0, v, 0.0).back() == 0.0);
}

TEST_CASE("parameter overrides") {
  BenchmarkParams p;
  p.burgers_epsilon = -1.0;
  CHECK_THROWS(make_benchmark(BenchmarkId::burgers, p));
}
