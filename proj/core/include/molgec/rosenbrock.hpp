#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "molgec/spatial.hpp"
#include "molgec/tridiag.hpp"

namespace molgec {

/// ROS3P, a three-stage third-order A-stable Rosenbrock method, in the
/// classical form
///   (I - gamma tau J) k_i = tau F(t + alpha_i tau, y + sum_j alpha_ij k_j)
///                         + tau J sum_j gamma_ij k_j + gamma_i tau^2 F_t,
///   y_new = y + sum_i b_i k_i.
struct RosenbrockTableau {
  static constexpr int stages = 3;
  static constexpr int order = 3;

  double gamma;
  std::array<std::array<double, 3>, 3> alpha;       // strictly lower
  std::array<std::array<double, 3>, 3> gamma_off;   // strictly lower gamma_ij
  std::array<double, 3> b;

  /// alpha_i = sum_j alpha_ij
  double alpha_sum(int i) const;
  /// gamma_i = gamma + sum_j gamma_ij
  double gamma_sum(int i) const;

  /// Stability function R(z) for y' = lambda y, z = tau lambda.
  std::complex<double> stability(std::complex<double> z) const;

  /// Residuals of the four order-3 conditions.
  std::array<double, 4> order_condition_residuals() const;
};

const RosenbrockTableau& ros3p();

/// Coefficients for the implementation form with one LU of (I - gamma tau J):
///   (I - gamma tau J) U_i = gamma tau [F(t + alpha_i tau, y + sum_j a_ij U_j)
///                                      + sum_j (c_ij / tau) U_j + gamma_i tau F_t],
///   y_new = y + sum_i m_i U_i.
struct TransformedTableau {
  std::array<std::array<double, 3>, 3> a{};
  std::array<std::array<double, 3>, 3> c{};
  std::array<double, 3> m{};
  std::array<double, 3> alpha{};
  std::array<double, 3> gamma_i{};
  double gamma = 0.0;
};
TransformedTableau transform(const RosenbrockTableau& tab);

/// One ROS3P step from (t, v) with step tau. `jac` must be the Jacobian at
/// (t, v) and `lu` the factorization of (I - gamma tau jac). `f0` = F(t, v).
std::vector<double> ros3p_step(const SemiDiscreteSystem& system, double t, double tau,
                               std::span<const double> v, std::span<const double> f0,
                               const ShiftedSolver& lu);

/// Cubic Hermite interpolant on [t0, t0 + tau] through (v0, f0) and (v1, f1).
struct HermiteSegment {
  double t0 = 0.0;
  double tau = 0.0;
  std::span<const double> v0;
  std::span<const double> f0;
  std::span<const double> v1;
  std::span<const double> f1;

  std::vector<double> value(double theta) const;
  /// d/dt at t0 + theta tau.
  std::vector<double> derivative(double theta) const;
};

struct MidpointData {
  std::vector<double> state;
  std::vector<double> slope;
};

/// Interpolant and its time derivative at theta = 1/2.
MidpointData hermite_midpoint(const HermiteSegment& seg);

struct MidpointResidual {
  double t_mid = 0.0;
  std::vector<double> state;     // V_h(t_{n+1/2})
  std::vector<double> rhs;       // F_h(t_{n+1/2}, state)
  std::vector<double> residual;  // V_h'(t_{n+1/2}) - rhs
};

/// Defect of the cubic Hermite extension halfway the step interval.
MidpointResidual residual_midpoint(const SemiDiscreteSystem& system, const HermiteSegment& seg);

/// Est = (2/3) (I - gamma tau A)^{-1} r_mid, reusing the step factorization.
std::vector<double> local_error_estimate(const ShiftedSolver& lu, std::span<const double> residual);

struct StepProposal {
  double tau_next = 0.0;
  bool accept = false;
};

/// Accept iff error <= tol; the new step is
///   min(1.5, max(2/3, 0.9 (tol/error)^{1/3})) tau,
/// then fitted so that the rest of [t, horizon] is covered by equal steps,
/// with t = t_n + tau on acceptance and t = t_n on rejection.
StepProposal propose_step(double error, double tol, double tau, double t_n, double horizon);

/// tau' = (T - t) / floor(1 + (T - t)/tau)
double fit_to_horizon(double tau, double t, double horizon);

}  // namespace molgec
