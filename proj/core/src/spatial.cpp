#include "molgec/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace molgec {

std::vector<double> SemiDiscreteSystem::rhs_time_derivative(double t,
                                                            std::span<const double> v) const {
  const double dt = 1e-6 * std::max(1.0, std::abs(t));
  auto plus = rhs(t + dt, v);
  const auto minus = rhs(t - dt, v);
  for (std::size_t i = 0; i < plus.size(); ++i) {
    plus[i] = (plus[i] - minus[i]) / (2.0 * dt);
  }
  return plus;
}

Stencil first_derivative_stencil(double hl, double hr) {
  return {-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr))};
}

Stencil second_derivative_stencil(double hl, double hr) {
  return {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
}

namespace {

void check_size(const Mesh& mesh, std::span<const double> v) {
  if (v.size() != mesh.unknown_count()) {
    throw std::invalid_argument("grid function size does not match the mesh unknowns");
  }
}

// Value at global node i: an unknown or, for Dirichlet ends, the boundary data.
struct NodalView {
  const ProblemSpec& spec;
  const Mesh& mesh;
  std::span<const double> v;
  double left;
  double right;

  double operator()(std::size_t i) const {
    if (mesh.boundary() == BoundaryKind::neumann) return v[i];
    if (i == 0) return left;
    if (i == mesh.node_count() - 1) return right;
    return v[i - 1];
  }
};

}  // namespace

std::vector<double> apply_rhs(const ProblemSpec& spec, const Mesh& mesh, double t,
                              std::span<const double> v) {
  check_size(mesh, v);
  const double g_left = spec.left(t);
  const double g_right = spec.right(t);
  const NodalView u{spec, mesh, v, g_left, g_right};
  const std::size_t last = mesh.node_count() - 1;

  std::vector<double> out(mesh.unknown_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t i = mesh.node_of_unknown(k);
    const double x = mesh.node(i);
    double p;
    double s;
    if (i == 0) {
      // Ghost node x_{-1} = x_0 - h_1 eliminated through the central flux difference.
      const double h = mesh.spacing(1);
      p = g_left;
      s = 2.0 * (u(1) - u(0) - h * g_left) / (h * h);
    } else if (i == last) {
      const double h = mesh.spacing(last);
      p = g_right;
      s = 2.0 * (u(last - 1) - u(last) + h * g_right) / (h * h);
    } else {
      const double hl = mesh.spacing(i);
      const double hr = mesh.spacing(i + 1);
      const auto d1 = first_derivative_stencil(hl, hr);
      const auto d2 = second_derivative_stencil(hl, hr);
      const double ul = u(i - 1);
      const double uc = u(i);
      const double ur = u(i + 1);
      p = d1.left * ul + d1.center * uc + d1.right * ur;
      s = d2.left * ul + d2.center * uc + d2.right * ur;
    }
    out[k] = spec.rhs(t, x, u(i), p, s);
  }
  return out;
}

Tridiag jacobian(const ProblemSpec& spec, const Mesh& mesh, double t, std::span<const double> v) {
  check_size(mesh, v);
  const double g_left = spec.left(t);
  const double g_right = spec.right(t);
  const NodalView u{spec, mesh, v, g_left, g_right};
  const std::size_t last = mesh.node_count() - 1;
  const std::size_t n = mesh.unknown_count();

  Tridiag a(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = mesh.node_of_unknown(k);
    const double x = mesh.node(i);
    if (i == 0) {
      const double h = mesh.spacing(1);
      const double s = 2.0 * (u(1) - u(0) - h * g_left) / (h * h);
      const auto d = spec.partials(t, x, u(0), g_left, s);
      a.diag(k) = d.du - 2.0 * d.ds / (h * h);
      if (k + 1 < n) a.upper(k) = 2.0 * d.ds / (h * h);
      continue;
    }
    if (i == last) {
      const double h = mesh.spacing(last);
      const double s = 2.0 * (u(last - 1) - u(last) + h * g_right) / (h * h);
      const auto d = spec.partials(t, x, u(last), g_right, s);
      a.diag(k) = d.du - 2.0 * d.ds / (h * h);
      if (k > 0) a.lower(k) = 2.0 * d.ds / (h * h);
      continue;
    }
    const double hl = mesh.spacing(i);
    const double hr = mesh.spacing(i + 1);
    const auto d1 = first_derivative_stencil(hl, hr);
    const auto d2 = second_derivative_stencil(hl, hr);
    const double ul = u(i - 1);
    const double uc = u(i);
    const double ur = u(i + 1);
    const double p = d1.left * ul + d1.center * uc + d1.right * ur;
    const double s = d2.left * ul + d2.center * uc + d2.right * ur;
    const auto d = spec.partials(t, x, uc, p, s);
    a.diag(k) = d.du + d.dp * d1.center + d.ds * d2.center;
    if (k > 0) a.lower(k) = d.dp * d1.left + d.ds * d2.left;
    if (k + 1 < n) a.upper(k) = d.dp * d1.right + d.ds * d2.right;
  }
  return a;
}

std::vector<double> MolSystem::rhs(double t, std::span<const double> v) const {
  return apply_rhs(*spec_, *mesh_, t, v);
}

Tridiag MolSystem::jacobian(double t, std::span<const double> v) const {
  return molgec::jacobian(*spec_, *mesh_, t, v);
}

}  // namespace molgec
