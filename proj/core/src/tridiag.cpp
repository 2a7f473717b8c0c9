#include "molgec/tridiag.hpp"

#include <cmath>

namespace molgec {

std::vector<double> Tridiag::apply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) {
    throw std::invalid_argument("Tridiag::apply: size mismatch");
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag_[i] * x[i];
    if (i > 0) v += lower_[i] * x[i - 1];
    if (i + 1 < n) v += upper_[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

void ShiftedSolver::factorize(const Tridiag& a, double c) {
  const std::size_t n = a.size();
  shift_ = c;
  lower_.assign(n, 0.0);
  pivot_.assign(n, 0.0);
  upper_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double sub = i > 0 ? -c * a.lower(i) : 0.0;
    double d = 1.0 - c * a.diag(i);
    if (i > 0) {
      lower_[i] = sub / pivot_[i - 1];
      d -= lower_[i] * upper_[i - 1];
    }
    if (d == 0.0 || !std::isfinite(d)) {
      pivot_.clear();
      throw SingularSystemError(i);
    }
    pivot_[i] = d;
    upper_[i] = i + 1 < n ? -c * a.upper(i) : 0.0;
  }
}

void ShiftedSolver::solve_in_place(std::span<double> x) const {
  const std::size_t n = pivot_.size();
  if (x.size() != n) {
    throw std::invalid_argument("ShiftedSolver::solve: size mismatch");
  }
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) {
    x[i] -= lower_[i] * x[i - 1];
  }
  x[n - 1] /= pivot_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] = (x[i] - upper_[i] * x[i + 1]) / pivot_[i];
  }
}

std::vector<double> ShiftedSolver::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

std::vector<double> solve_shifted(const Tridiag& a, double c, std::span<const double> rhs) {
  return ShiftedSolver(a, c).solve(rhs);
}

}  // namespace molgec
