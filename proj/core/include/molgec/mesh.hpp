#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace molgec {

enum class BoundaryKind { dirichlet, neumann };

struct Interval {
  double left = 0.0;
  double right = 1.0;

  double length() const { return right - left; }
};

/// A 1D mesh x_0 < x_1 < ... < x_{K}. For Dirichlet problems the unknowns are
/// the interior nodes, for Neumann problems every node carries an unknown.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<double> nodes, BoundaryKind bc);

  static Mesh uniform(Interval domain, std::size_t intervals, BoundaryKind bc);

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t interval_count() const { return nodes_.size() - 1; }

  /// h_i = x_i - x_{i-1}, i = 1..interval_count().
  double spacing(std::size_t i) const { return nodes_[i] - nodes_[i - 1]; }

  BoundaryKind boundary() const { return bc_; }
  Interval domain() const { return {nodes_.front(), nodes_.back()}; }

  std::size_t unknown_count() const;
  /// Global node index of unknown 0.
  std::size_t first_unknown() const { return bc_ == BoundaryKind::dirichlet ? 1 : 0; }
  std::size_t node_of_unknown(std::size_t k) const { return k + first_unknown(); }

  std::vector<double> unknown_coordinates() const;

  /// Quadrature weights (h_i + h_{i+1})/2 of the discrete L2 norm, one per unknown.
  /// A Neumann boundary unknown gets half its single adjacent interval.
  std::vector<double> norm_weights() const;

  bool operator==(const Mesh&) const = default;

 private:
  std::vector<double> nodes_;
  BoundaryKind bc_ = BoundaryKind::dirichlet;
};

/// Unknown count -> interval count for the given boundary kind, and back.
std::size_t intervals_for_unknowns(std::size_t unknowns, BoundaryKind bc);
std::size_t unknowns_for_intervals(std::size_t intervals, BoundaryKind bc);

/// Discrete L2 norm ( sum_i w_i y_i^2 )^{1/2} over the unknowns of `mesh`.
double l2_norm(const Mesh& mesh, std::span<const double> values);

/// Coarse mesh and its bisection. Coarse node j coincides with fine node 2j;
/// odd fine nodes are the midpoint set.
class MeshPair {
 public:
  MeshPair() = default;

  static MeshPair from_coarse(Mesh coarse);
  /// Uniform pair whose fine level has `fine_unknowns` unknowns.
  static MeshPair uniform(Interval domain, std::size_t fine_unknowns, BoundaryKind bc);

  const Mesh& coarse() const { return coarse_; }
  const Mesh& fine() const { return fine_; }
  BoundaryKind boundary() const { return coarse_.boundary(); }

  /// Fine unknown index holding coarse unknown `k`.
  std::size_t fine_unknown_of_coarse(std::size_t k) const;

  /// Injection of a fine grid function onto the coarse unknowns.
  std::vector<double> restrict_to_coarse(std::span<const double> fine_values) const;
  /// Inverse of the injection on shared nodes; midpoint values are zero.
  std::vector<double> inject_to_fine(std::span<const double> coarse_values) const;

  /// Global fine node indices of the midpoint set.
  std::vector<std::size_t> midpoint_nodes() const;

 private:
  Mesh coarse_;
  Mesh fine_;
};

/// Marks on fine midpoint nodes (global fine node indices, all odd).
struct AdaptMarks {
  std::vector<std::size_t> refine;
  std::vector<std::size_t> coarsen;
};

/// Refines marked coarse intervals, removes coarse nodes whose two flanking
/// intervals are equidistant and both coarsen-marked, smooths the result to
/// 0.5 <= h_i/h_{i-1} <= 2 and rebuilds the fine level by bisection.
MeshPair adapt_coarse_mesh(const MeshPair& pair, const AdaptMarks& marks);

/// Splits intervals until every neighbouring spacing ratio lies in [0.5, 2].
std::vector<double> smooth_nodes(std::vector<double> nodes);

bool satisfies_ratio_bound(const Mesh& mesh);

/// Nodal slopes by differentiating the degree-4 interpolant through the five
/// nearest nodes (one-sided windows near the ends).
std::vector<double> nodal_slopes(std::span<const double> nodes, std::span<const double> values);

/// Piecewise cubic Hermite transfer of nodal values (all nodes, boundaries
/// included) from `from` to `to`.
std::vector<double> transfer_solution(std::span<const double> values, const Mesh& from,
                                      const Mesh& to);

void write_nodes(std::ostream& out, const Mesh& mesh);
Mesh read_nodes(std::istream& in, BoundaryKind bc);

}  // namespace molgec
