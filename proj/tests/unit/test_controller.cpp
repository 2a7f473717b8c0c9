#include <cmath>

#include "doctest.h"
#include "molgec/controller.hpp"

using namespace molgec;
using doctest::Approx;

namespace {

ReportRow row_with(double tol_m, double time, double space, double total) {
  ReportRow r;
  r.tol_m = tol_m;
  r.norm_time_est = time;
  r.norm_space_est = space;
  r.norm_total_est = total;
  return r;
}

}  // namespace

TEST_CASE("time error gate") {
  const ControlConstants c;
  SUBCASE("too large a time error shrinks the tolerances") {
    const auto g = time_error_gate(row_with(2.02e-3, 2.87e-3, 0.0, 0.0), c);
    CHECK_FALSE(g.pass);
    CHECK(g.factor == Approx(0.235).epsilon(0.01));
    LocalTolerances t{1e-3, 1e-3, 1e-2, 1e-2};
    apply_time_gate(t, g);
    CHECK(t.abs == Approx(2.35e-4).epsilon(0.01));
    CHECK(t.rel == Approx(2.35e-4).epsilon(0.01));
    CHECK(t.alpha_abs == 1e-2);
  }
  SUBCASE("zero time error passes") { CHECK(time_error_gate(row_with(1e-3, 0.0, 0.0, 0.0), c).pass); }
  SUBCASE("the bound itself passes") {
    const double tol_m = 1.7e-3;
    CHECK(time_error_gate(row_with(tol_m, c.c_time * c.c_control * tol_m, 0.0, 0.0), c).pass);
  }
}

TEST_CASE("uniform space update") {
  const ControlConstants c;
  SUBCASE("four times the space budget halves h") {
    const double tol_m = 1e-3;
    const auto u = uniform_space_update(row_with(tol_m, 0.0, 4.0 * (1.0 - c.c_time) * tol_m, 1.0),
                                        c, 51, BoundaryKind::dirichlet);
    CHECK_FALSE(u.pass);
    CHECK(u.factor == Approx(0.5));
    CHECK(u.unknowns == 103);
  }
  SUBCASE("second attempt on the front problem") {
    const auto u = uniform_space_update(row_with(2.02e-3, 4.7e-4, 4.50e-3, 4.6e-3), c, 831,
                                        BoundaryKind::dirichlet);
    CHECK_FALSE(u.pass);
    CHECK(u.unknowns == 1521);
  }
  SUBCASE("a controlled total error passes unchanged") {
    const auto u = uniform_space_update(row_with(1e-3, 1e-4, 5e-3, 1.2e-3), c, 51, BoundaryKind::dirichlet);
    CHECK(u.pass);
    CHECK(u.unknowns == 51);
  }
}

TEST_CASE("adaptive space update") {
  const ControlConstants c;
  const auto u = adaptive_space_update(row_with(1e-3, 1e-4, 2e-3, 2e-3), c);
  CHECK_FALSE(u.pass);
  CHECK(u.factor == Approx((2.0 / 3.0) * 1e-3 / 2e-3));
  SUBCASE("no progress is forced down") {
    const auto g = adaptive_space_update(row_with(1e-3, 1e-3, (1.0 - c.c_time) * 1e-3, 2e-3), c);
    CHECK(g.factor == 0.5);
  }
  CHECK(adaptive_space_update(row_with(1e-3, 1e-4, 2e-3, 1e-3), c).pass);
}

TEST_CASE("observed order") {
  CHECK(*observed_order(4.0, 1.0, 0.2, 0.1) == Approx(2.0).epsilon(1e-15));
  CHECK(*observed_order(8.0, 1.0, 0.2, 0.1) == Approx(3.0).epsilon(1e-15));
  CHECK_FALSE(observed_order(0.0, 1.0, 0.2, 0.1));
  CHECK_FALSE(observed_order(1.0, 1.0, 0.1, 0.1));
  CHECK(order_acceptable(2.24, 2, 51));
  CHECK_FALSE(order_acceptable(2.3, 2, 51));
  CHECK(order_acceptable(2.45, 2, 25));
  CHECK_FALSE(order_acceptable(std::nullopt, 2, 25));
  CHECK(order_acceptable(2.34, 2, 103, true));
  CHECK_FALSE(order_acceptable(2.34, 2, 103, false));
  CHECK_FALSE(order_acceptable(2.6, 2, 103, true));
}

TEST_CASE("resolution helpers") {
  CHECK(valid_resolution(51, BoundaryKind::dirichlet));
  CHECK_FALSE(valid_resolution(50, BoundaryKind::dirichlet));
  CHECK(valid_resolution(25, BoundaryKind::neumann));
  CHECK_FALSE(valid_resolution(26, BoundaryKind::neumann));
  CHECK(coarser_resolution(51, BoundaryKind::dirichlet) == 25);
  CHECK(coarser_resolution(25, BoundaryKind::neumann) == 13);
  CHECK(coarser_resolution(207, BoundaryKind::neumann) == 103);
  CHECK(coarser_resolution(51, BoundaryKind::neumann) == 25);
  CHECK(resolution_for_ratio(51, 1.0, BoundaryKind::dirichlet) == 51);
  CHECK(resolution_for_ratio(51, 0.9, BoundaryKind::dirichlet) == 57);
}

TEST_CASE("constants are validated") {
  ControlConstants c;
  c.c_time = 1.5;
  CHECK_THROWS(c.validate());
}

TEST_CASE("steady linear profile has no error to estimate") {
  ProblemSpec s;
  s.name = "steady";
  s.domain = {0.0, 1.0};
  s.rhs = [](double, double, double, double, double) { return 0.0; };
  s.partials = [](double, double, double, double, double) { return RhsPartials{}; };
  s.exact = [](double, double x) { return 1.0 + 2.0 * x; };
  s.left = [](double) { return 1.0; };
  s.right = [](double) { return 3.0; };
  s.initial = [](double x) { return 1.0 + 2.0 * x; };
  const auto r = run_single(s, MeshPair::uniform(s.domain, 21, s.bc), {}, {});
  CHECK(r.trace.rejected == 0);
  for (double e : r.errors.time_error) CHECK(e == 0.0);
  for (double e : r.errors.space_error) CHECK(e == 0.0);
}

TEST_CASE("heat run at a loose tolerance") {
  const auto s = make_benchmark(BenchmarkId::heat_neumann);
  const LocalTolerances tol{1e-2, 1e-2, 1e-1, 1e-1};
  const auto r = run_single(s, MeshPair::uniform(s.domain, 25, s.bc), tol, {});
  const auto row = make_row(s, r, {1e-2, 1e-2}, tol, RefinementMode::uniform);
  CHECK(row.unknowns == 25);
  CHECK(row.norm_time_est == Approx(1.16e-4).epsilon(0.15));
  CHECK(row.norm_space_est == Approx(8.20e-4).epsilon(0.10));
  REQUIRE(row.theta_est);
  CHECK(*row.theta_est == Approx(0.99).epsilon(0.05));
  CHECK(r.trace.steps.empty());
}

TEST_CASE("step records are kept on request") {
  const auto s = make_benchmark(BenchmarkId::heat_neumann);
  RunOptions o;
  o.record_steps = true;
  const auto r = run_single(s, MeshPair::uniform(s.domain, 13, s.bc), {1e-2, 1e-2, 1e-1, 1e-1}, o);
  REQUIRE(!r.trace.steps.empty());
  CHECK(r.trace.steps.size() == r.trace.accepted + r.trace.rejected);
  double t = 0.0;
  for (const auto& st : r.trace.steps) {
    CHECK(st.t == Approx(t));
    if (st.accepted) t += st.tau;
  }
  CHECK(t == Approx(s.horizon).epsilon(1e-12));
}

TEST_CASE("runaway guard") {
  const auto s = make_benchmark(BenchmarkId::heat_neumann);
  RunOptions o;
  o.max_steps = 3;
  CHECK_THROWS_AS(run_single(s, MeshPair::uniform(s.domain, 13, s.bc), {}, o), RunError);
}

TEST_CASE("heat control at a tight tolerance passes first time") {
  const auto s = make_benchmark(BenchmarkId::heat_neumann);
  ControlOptions o;
  o.gtol = {1e-5, 1e-5};
  o.initial_unknowns = 207;
  const auto rep = control_uniform(s, o);
  CHECK(rep.verdict == Verdict::converged);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.accepted_row == std::size_t{0});
  CHECK(rep.rows[1].check_run);
  CHECK(rep.rows[1].unknowns == 103);
  REQUIRE(rep.rows[1].q_num);
  CHECK(*rep.rows[1].q_num == Approx(2.01).epsilon(0.05));
}
