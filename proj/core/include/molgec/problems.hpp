#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molgec/mesh.hpp"

namespace molgec {

/// Partial derivatives of f(t, x, u, p, s) with respect to u, p = u_x and s = u_xx.
struct RhsPartials {
  double du = 0.0;
  double dp = 0.0;
  double ds = 0.0;
};

/// Scalar parabolic problem  u_t = f(t, x, u, u_x, u_xx)  on an interval.
struct ProblemSpec {
  std::string name;
  Interval domain;
  double horizon = 1.0;
  BoundaryKind bc = BoundaryKind::dirichlet;

  std::function<double(double t, double x, double u, double p, double s)> rhs;
  std::function<RhsPartials(double t, double x, double u, double p, double s)> partials;

  /// Dirichlet value or Neumann flux u_x at the left/right end.
  std::function<double(double t)> left;
  std::function<double(double t)> right;

  std::function<double(double x)> initial;
  std::function<double(double t, double x)> exact;  // empty when unknown

  int spatial_order = 2;

  bool has_exact() const { return static_cast<bool>(exact); }
};

enum class BenchmarkId { heat_neumann, burgers, allen_cahn };

struct BenchmarkParams {
  double burgers_epsilon = 0.015;
  double allen_cahn_diffusion = 1e-2;
  double allen_cahn_reaction = 100.0;
  double allen_cahn_lambda = 0.0;  // 0 selects 50*sqrt(2)
  double allen_cahn_speed = 0.0;   // 0 selects 1.5*sqrt(2)
};

ProblemSpec make_benchmark(BenchmarkId id, const BenchmarkParams& params = {});
/// Looks a benchmark up by name ("heat_neumann", "burgers", "allen_cahn").
ProblemSpec make_benchmark(const std::string& name, const BenchmarkParams& params = {});
std::optional<BenchmarkId> parse_benchmark(const std::string& name);
std::string benchmark_name(BenchmarkId id);
std::vector<std::string> benchmark_names();

/// u(t, x_i) at every unknown of `mesh`.
std::vector<double> exact_restriction(const ProblemSpec& spec, const Mesh& mesh, double t);

/// u_0(x_i) at every unknown of `mesh`.
std::vector<double> initial_restriction(const ProblemSpec& spec, const Mesh& mesh);

/// Nodal values on every node of `mesh`: the unknowns from `values`, Dirichlet
/// boundary nodes filled from the boundary data at time t (or with
/// `boundary_fill` when given, e.g. zero for error fields).
std::vector<double> with_boundary(const ProblemSpec& spec, const Mesh& mesh, double t,
                                  std::span<const double> values,
                                  std::optional<double> boundary_fill = std::nullopt);

}  // namespace molgec
