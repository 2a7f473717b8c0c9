#include "molgec/error_estimation.hpp"

#include <cmath>
#include <stdexcept>

#include "molgec/spatial.hpp"

namespace molgec {

namespace {

bool equidistant(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(a, b); }

// Values at every coarse node. Dirichlet ends carry no estimate; they are
// filled by linear extrapolation from the two nearest interior nodes.
std::vector<double> coarse_nodal(std::span<const double> unknown_values, const Mesh& coarse) {
  if (unknown_values.size() != coarse.unknown_count()) {
    throw std::invalid_argument("coarse estimate does not live on the coarse level");
  }
  if (coarse.boundary() == BoundaryKind::neumann) {
    return {unknown_values.begin(), unknown_values.end()};
  }
  const std::size_t last = coarse.node_count() - 1;
  std::vector<double> out(coarse.node_count());
  for (std::size_t k = 0; k < unknown_values.size(); ++k) out[k + 1] = unknown_values[k];
  if (unknown_values.size() == 1) {
    out[0] = out[1];
    out[last] = out[1];
    return out;
  }
  const double hl1 = coarse.spacing(1);
  const double hl2 = coarse.spacing(2);
  out[0] = out[1] + (out[1] - out[2]) * hl1 / hl2;
  const double hr1 = coarse.spacing(last);
  const double hr2 = coarse.spacing(last - 1);
  out[last] = out[last - 1] + (out[last - 1] - out[last - 2]) * hr1 / hr2;
  return out;
}

std::vector<double> fine_from_nodal(const std::vector<double>& nodal, const MeshPair& pair) {
  const Mesh& fine = pair.fine();
  std::vector<double> out(fine.unknown_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t i = fine.node_of_unknown(k);
    out[k] = i % 2 == 0 ? nodal[i / 2] : 0.5 * (nodal[i / 2] + nodal[i / 2 + 1]);
  }
  return out;
}

}  // namespace

std::vector<double> truncation_estimate_coarse(const ProblemSpec& spec, const MeshPair& pair,
                                               double t, std::span<const double> fine_state,
                                               std::span<const double> fine_rhs) {
  if (fine_rhs.size() != fine_state.size()) {
    throw std::invalid_argument("truncation_estimate_coarse: size mismatch");
  }
  const auto coarse_state = pair.restrict_to_coarse(fine_state);
  auto out = pair.restrict_to_coarse(fine_rhs);
  const auto coarse_rhs = apply_rhs(spec, pair.coarse(), t, coarse_state);
  const double p = std::ldexp(1.0, spec.spatial_order);
  const double factor = p / (p - 1.0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = factor * (out[k] - coarse_rhs[k]);
  return out;
}

std::vector<double> prolongate_truncation(std::span<const double> coarse_estimate,
                                          const MeshPair& pair, int order) {
  const Mesh& coarse = pair.coarse();
  const double full = std::ldexp(1.0, order);
  const double reduced = std::ldexp(1.0, order - 1);
  std::vector<double> scaled(coarse_estimate.begin(), coarse_estimate.end());
  const std::size_t last = coarse.node_count() - 1;
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    const std::size_t j = coarse.node_of_unknown(k);
    // Boundary nodes see a mirrored ghost interval and count as equidistant.
    const bool equal = j == 0 || j == last || equidistant(coarse.spacing(j), coarse.spacing(j + 1));
    scaled[k] /= equal ? full : reduced;
  }
  return fine_from_nodal(coarse_nodal(scaled, coarse), pair);
}

std::vector<double> midpoint_truncation(std::span<const double> coarse_estimate,
                                        const MeshPair& pair) {
  const auto nodal = coarse_nodal(coarse_estimate, pair.coarse());
  std::vector<double> out(pair.coarse().interval_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (nodal[k] + nodal[k + 1]);
  return out;
}

void advance_time_error(std::vector<double>& time_error, const ShiftedSolver& half_lu, double tau,
                        std::span<const double> residual_mid) {
  if (residual_mid.size() != time_error.size()) {
    throw std::invalid_argument("advance_time_error: size mismatch");
  }
  std::vector<double> d(time_error.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = 2.0 * time_error[k] + (2.0 / 3.0) * tau * residual_mid[k];
  }
  half_lu.solve_in_place(d);
  for (std::size_t k = 0; k < d.size(); ++k) time_error[k] = d[k] - time_error[k];
}

void advance_space_error(std::vector<double>& space_error, const ShiftedSolver& half_lu,
                         double tau, std::span<const double> truncation_mid) {
  if (truncation_mid.size() != space_error.size()) {
    throw std::invalid_argument("advance_space_error: size mismatch");
  }
  std::vector<double> d(space_error.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = 2.0 * space_error[k] - tau * truncation_mid[k];
  }
  half_lu.solve_in_place(d);
  for (std::size_t k = 0; k < d.size(); ++k) space_error[k] = d[k] - space_error[k];
}

AlphaIndicator alpha_indicator(std::span<const double> midpoint_values, const MeshPair& pair,
                               double tol_alpha) {
  const std::size_t intervals = pair.coarse().interval_count();
  if (midpoint_values.size() != intervals) {
    throw std::invalid_argument("alpha_indicator: one value per fine midpoint expected");
  }
  const Mesh& fine = pair.fine();
  AlphaIndicator out;
  out.threshold = 0.9 * tol_alpha / std::sqrt(static_cast<double>(fine.unknown_count()));
  double sum = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) {
    const std::size_t node = 2 * k + 1;
    const double h = fine.spacing(node);
    const double a = std::abs(midpoint_values[k]);
    sum += 2.0 * h * a * a;
    const double local = std::sqrt(h) * a;
    if (local > out.threshold) {
      out.marks.refine.push_back(node);
    } else if (local < 0.1 * out.threshold) {
      out.marks.coarsen.push_back(node);
    }
  }
  out.value = std::sqrt(sum);
  return out;
}

}  // namespace molgec
