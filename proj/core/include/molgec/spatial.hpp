#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "molgec/mesh.hpp"
#include "molgec/problems.hpp"
#include "molgec/tridiag.hpp"

namespace molgec {

/// ODE system U' = F(t, U) with a tridiagonal Jacobian.
class SemiDiscreteSystem {
 public:
  virtual ~SemiDiscreteSystem() = default;

  virtual std::size_t size() const = 0;
  virtual std::vector<double> rhs(double t, std::span<const double> v) const = 0;
  virtual Tridiag jacobian(double t, std::span<const double> v) const = 0;

  /// dF/dt at fixed U. The default is a central difference in t.
  virtual std::vector<double> rhs_time_derivative(double t, std::span<const double> v) const;
};

/// Second-order finite differences of a ProblemSpec on a (non-uniform) mesh.
class MolSystem final : public SemiDiscreteSystem {
 public:
  MolSystem(const ProblemSpec& spec, const Mesh& mesh) : spec_(&spec), mesh_(&mesh) {}

  std::size_t size() const override { return mesh_->unknown_count(); }
  std::vector<double> rhs(double t, std::span<const double> v) const override;
  Tridiag jacobian(double t, std::span<const double> v) const override;

  const ProblemSpec& spec() const { return *spec_; }
  const Mesh& mesh() const { return *mesh_; }

 private:
  const ProblemSpec* spec_;
  const Mesh* mesh_;
};

/// Three-point weights on nodes (x_{i-1}, x_i, x_{i+1}) for spacings
/// h_l = x_i - x_{i-1}, h_r = x_{i+1} - x_i; exact for quadratics.
struct Stencil {
  double left = 0.0;
  double center = 0.0;
  double right = 0.0;
};
Stencil first_derivative_stencil(double h_left, double h_right);
Stencil second_derivative_stencil(double h_left, double h_right);

/// F_h(t, v) on the unknowns of `mesh`.
std::vector<double> apply_rhs(const ProblemSpec& spec, const Mesh& mesh, double t,
                              std::span<const double> v);

/// dF_h/dU assembled from the analytic partials of f with the same stencils
/// and boundary eliminations as apply_rhs.
Tridiag jacobian(const ProblemSpec& spec, const Mesh& mesh, double t, std::span<const double> v);

}  // namespace molgec
