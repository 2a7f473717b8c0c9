#pragma once

#include <span>
#include <vector>

#include "molgec/mesh.hpp"
#include "molgec/problems.hpp"
#include "molgec/tridiag.hpp"

namespace molgec {

/// Global error estimates carried along the time integration on the fine mesh.
struct ErrorState {
  std::vector<double> time_error;   // e~_h
  std::vector<double> space_error;  // eta~_h

  static ErrorState zero(std::size_t unknowns) {
    return {std::vector<double>(unknowns, 0.0), std::vector<double>(unknowns, 0.0)};
  }
};

/// Richardson estimate of the spatial truncation error on the coarse level:
///   (2^q / (2^q - 1)) (R F_h(t, V) - F_2h(t, R V)).
/// `fine_state` and `fine_rhs` are V_h(t) and F_h(t, V_h(t)) on the fine level.
std::vector<double> truncation_estimate_coarse(const ProblemSpec& spec, const MeshPair& pair,
                                               double t, std::span<const double> fine_state,
                                               std::span<const double> fine_rhs);

/// Coarse truncation estimate carried to the fine level. Shared nodes get the
/// coarse value divided by 2^q where the two flanking fine intervals are equal
/// and by 2^{q-1} otherwise; midpoints interpolate linearly between the scaled
/// neighbours (extrapolating next to a Dirichlet end).
std::vector<double> prolongate_truncation(std::span<const double> coarse_estimate,
                                          const MeshPair& pair, int order = 2);

/// Unscaled coarse estimate interpolated to each fine midpoint, indexed by
/// coarse interval.
std::vector<double> midpoint_truncation(std::span<const double> coarse_estimate,
                                        const MeshPair& pair);

/// Implicit midpoint step for e' = A e + (2/3) r_mid:
///   (I - tau/2 A) d = 2 e_n + (2/3) tau r_mid,  e_{n+1} = d - e_n.
/// `half_lu` is the factorization of (I - tau/2 A).
void advance_time_error(std::vector<double>& time_error, const ShiftedSolver& half_lu, double tau,
                        std::span<const double> residual_mid);

/// Implicit midpoint step for eta' = A eta - alpha_h(t_mid).
void advance_space_error(std::vector<double>& space_error, const ShiftedSolver& half_lu,
                         double tau, std::span<const double> truncation_mid);

struct AlphaIndicator {
  double value = 0.0;  // A_n
  double threshold = 0.0;  // alpha_tol
  AdaptMarks marks;
};

/// A_n^2 = sum over fine midpoints of 2 h_i |alpha_i|^2. Midpoints with
/// sqrt(h_i)|alpha_i| > alpha_tol are marked for refinement and those below
/// 0.1 alpha_tol for coarsening, alpha_tol = 0.9 tol / sqrt(N).
/// `midpoint_values` is indexed by coarse interval.
AlphaIndicator alpha_indicator(std::span<const double> midpoint_values, const MeshPair& pair,
                               double tol_alpha);

}  // namespace molgec
