#include "molgec/rosenbrock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace molgec {

double RosenbrockTableau::alpha_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < i; ++j) s += alpha[i][j];
  return s;
}

double RosenbrockTableau::gamma_sum(int i) const {
  double s = gamma;
  for (int j = 0; j < i; ++j) s += gamma_off[i][j];
  return s;
}

std::complex<double> RosenbrockTableau::stability(std::complex<double> z) const {
  std::array<std::complex<double>, 3> k{};
  std::complex<double> r = 1.0;
  for (int i = 0; i < stages; ++i) {
    std::complex<double> acc = 1.0;
    for (int j = 0; j < i; ++j) acc += (alpha[i][j] + gamma_off[i][j]) * k[j];
    k[i] = z * acc / (1.0 - gamma * z);
    r += b[i] * k[i];
  }
  return r;
}

std::array<double, 4> RosenbrockTableau::order_condition_residuals() const {
  // beta_ij = alpha_ij + gamma_ij (strictly lower part), beta'_i = sum_j beta_ij.
  std::array<double, 3> beta_row{};
  for (int i = 0; i < stages; ++i) {
    for (int j = 0; j < i; ++j) beta_row[i] += alpha[i][j] + gamma_off[i][j];
  }
  double c1 = -1.0;
  double c2 = -(0.5 - gamma);
  double c3 = -1.0 / 3.0;
  double c4 = -(1.0 / 6.0 - gamma + gamma * gamma);
  for (int i = 0; i < stages; ++i) {
    const double ai = alpha_sum(i);
    c1 += b[i];
    c2 += b[i] * beta_row[i];
    c3 += b[i] * ai * ai;
    for (int j = 0; j < i; ++j) c4 += b[i] * (alpha[i][j] + gamma_off[i][j]) * beta_row[j];
  }
  return {c1, c2, c3, c4};
}

const RosenbrockTableau& ros3p() {
  static const RosenbrockTableau tab = [] {
    const double s3 = std::sqrt(3.0);
    RosenbrockTableau t{};
    t.gamma = 0.5 + s3 / 6.0;
    t.alpha = {{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}};
    t.gamma_off = {{{0.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, {-t.gamma, -(0.5 + s3 / 3.0), 0.0}}};
    t.b = {2.0 / 3.0, 0.0, 1.0 / 3.0};
    return t;
  }();
  return tab;
}

TransformedTableau transform(const RosenbrockTableau& tab) {
  // Gamma = (gamma_ij) including the diagonal; invert the lower triangle.
  std::array<std::array<double, 3>, 3> g{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < i; ++j) g[i][j] = tab.gamma_off[i][j];
    g[i][i] = tab.gamma;
  }
  std::array<std::array<double, 3>, 3> inv{};
  for (int i = 0; i < 3; ++i) {
    inv[i][i] = 1.0 / g[i][i];
    for (int j = 0; j < i; ++j) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s += g[i][k] * inv[k][j];
      inv[i][j] = -s / g[i][i];
    }
  }
  TransformedTableau out;
  out.gamma = tab.gamma;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double a = 0.0;
      for (int k = 0; k < 3; ++k) a += tab.alpha[i][k] * inv[k][j];
      out.a[i][j] = a;
      out.c[i][j] = (i == j ? 1.0 / tab.gamma : 0.0) - inv[i][j];
    }
    // The diagonal of c is zero by construction; keep the strictly lower part.
    out.c[i][i] = 0.0;
    double m = 0.0;
    for (int k = 0; k < 3; ++k) m += tab.b[k] * inv[k][i];
    out.m[i] = m;
    out.alpha[i] = tab.alpha_sum(i);
    out.gamma_i[i] = tab.gamma_sum(i);
  }
  return out;
}

std::vector<double> ros3p_step(const SemiDiscreteSystem& system, double t, double tau,
                               std::span<const double> v, std::span<const double> f0,
                               const ShiftedSolver& lu) {
  static const TransformedTableau tab = transform(ros3p());
  const std::size_t n = v.size();
  if (f0.size() != n || lu.size() != n) {
    throw std::invalid_argument("ros3p_step: size mismatch");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("ros3p_step: step size must be positive");
  }
  const auto ft = system.rhs_time_derivative(t, v);
  const double gt = tab.gamma * tau;

  std::array<std::vector<double>, 3> stage;
  std::vector<double> y(n);
  std::vector<double> f;
  std::vector<double> prev_y;
  double prev_t = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double ti = t + tab.alpha[i] * tau;
    for (std::size_t k = 0; k < n; ++k) {
      double yk = v[k];
      for (int j = 0; j < i; ++j) yk += tab.a[i][j] * stage[j][k];
      y[k] = yk;
    }
    if (i == 0) {
      f.assign(f0.begin(), f0.end());
    } else if (!(ti == prev_t && y == prev_y)) {
      f = system.rhs(ti, y);
    }
    prev_t = ti;
    prev_y = y;
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < n; ++k) {
      double r = f[k] + tab.gamma_i[i] * tau * ft[k];
      for (int j = 0; j < i; ++j) r += tab.c[i][j] / tau * stage[j][k];
      rhs[k] = gt * r;
    }
    lu.solve_in_place(rhs);
    stage[i] = std::move(rhs);
  }
  std::vector<double> out(v.begin(), v.end());
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < n; ++k) out[k] += tab.m[i] * stage[i][k];
  }
  return out;
}

std::vector<double> HermiteSegment::value(double theta) const {
  const double v0c = (1 - theta) * (1 - theta) * (1 + 2 * theta);
  const double v1c = theta * theta * (3 - 2 * theta);
  const double w0c = (1 - theta) * (1 - theta) * theta;
  const double w1c = theta * theta * (theta - 1);
  std::vector<double> out(v0.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = v0c * v0[k] + v1c * v1[k] + tau * (w0c * f0[k] + w1c * f1[k]);
  }
  return out;
}

std::vector<double> HermiteSegment::derivative(double theta) const {
  const double dv0 = 6 * theta * (theta - 1);
  const double dv1 = -dv0;
  const double dw0 = (1 - theta) * (1 - 3 * theta);
  const double dw1 = theta * (3 * theta - 2);
  std::vector<double> out(v0.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (dv0 * v0[k] + dv1 * v1[k]) / tau + dw0 * f0[k] + dw1 * f1[k];
  }
  return out;
}

MidpointData hermite_midpoint(const HermiteSegment& seg) {
  if (!(seg.tau > 0.0)) {
    throw std::invalid_argument("hermite_midpoint: step size must be positive");
  }
  const std::size_t n = seg.v0.size();
  MidpointData out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.state[k] = 0.5 * (seg.v0[k] + seg.v1[k]) + seg.tau / 8.0 * (seg.f0[k] - seg.f1[k]);
    out.slope[k] = 1.5 / seg.tau * (seg.v1[k] - seg.v0[k]) - 0.25 * (seg.f0[k] + seg.f1[k]);
  }
  return out;
}

MidpointResidual residual_midpoint(const SemiDiscreteSystem& system, const HermiteSegment& seg) {
  auto mid = hermite_midpoint(seg);
  MidpointResidual out;
  out.t_mid = seg.t0 + 0.5 * seg.tau;
  out.rhs = system.rhs(out.t_mid, mid.state);
  out.residual = std::move(mid.slope);
  for (std::size_t k = 0; k < out.residual.size(); ++k) out.residual[k] -= out.rhs[k];
  out.state = std::move(mid.state);
  return out;
}

std::vector<double> local_error_estimate(const ShiftedSolver& lu, std::span<const double> residual) {
  std::vector<double> est(residual.begin(), residual.end());
  for (double& e : est) e *= 2.0 / 3.0;
  lu.solve_in_place(est);
  return est;
}

double fit_to_horizon(double tau, double t, double horizon) {
  const double remaining = horizon - t;
  if (!(remaining > 0.0)) return tau;
  return remaining / std::floor(1.0 + remaining / tau);
}

StepProposal propose_step(double error, double tol, double tau, double t_n, double horizon) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("propose_step: tolerance must be positive");
  }
  StepProposal out;
  out.accept = error <= tol;
  const double factor =
      error > 0.0 ? std::min(1.5, std::max(2.0 / 3.0, 0.9 * std::cbrt(tol / error))) : 1.5;
  const double t_from = out.accept ? t_n + tau : t_n;
  out.tau_next = fit_to_horizon(factor * tau, t_from, horizon);
  return out;
}

}  // namespace molgec
