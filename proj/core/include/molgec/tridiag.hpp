#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace molgec {

/// Square tridiagonal matrix. lower[i] couples row i to column i-1 (lower[0]
/// unused), upper[i] couples row i to column i+1 (upper[n-1] unused).
class Tridiag {
 public:
  Tridiag() = default;
  explicit Tridiag(std::size_t n) : lower_(n, 0.0), diag_(n, 0.0), upper_(n, 0.0) {}

  std::size_t size() const { return diag_.size(); }

  double& lower(std::size_t i) { return lower_[i]; }
  double& diag(std::size_t i) { return diag_[i]; }
  double& upper(std::size_t i) { return upper_[i]; }
  double lower(std::size_t i) const { return lower_[i]; }
  double diag(std::size_t i) const { return diag_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }

  /// y = A x
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::vector<double> lower_;
  std::vector<double> diag_;
  std::vector<double> upper_;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(std::size_t pivot)
      : std::runtime_error("singular tridiagonal system: zero pivot at row " + std::to_string(pivot)),
        pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

/// LU factorization of (I - c A) for a tridiagonal A (Thomas algorithm, no
/// pivoting). Factor once, solve for any number of right-hand sides.
class ShiftedSolver {
 public:
  ShiftedSolver() = default;
  ShiftedSolver(const Tridiag& a, double c) { factorize(a, c); }

  void factorize(const Tridiag& a, double c);
  bool factorized() const { return !pivot_.empty(); }
  double shift() const { return shift_; }
  std::size_t size() const { return pivot_.size(); }

  std::vector<double> solve(std::span<const double> rhs) const;
  void solve_in_place(std::span<double> x) const;

 private:
  double shift_ = 0.0;
  std::vector<double> lower_;
  std::vector<double> pivot_;  // U diagonal
  std::vector<double> upper_;
};

/// Solves (I - c A) w = rhs.
std::vector<double> solve_shifted(const Tridiag& a, double c, std::span<const double> rhs);

}  // namespace molgec
