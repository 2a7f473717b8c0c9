#include "molgec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace molgec {

namespace {

constexpr double kRatioSlack = 1e-10;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b));
}

std::vector<double> bisect(std::span<const double> nodes) {
  std::vector<double> fine;
  fine.reserve(2 * nodes.size() - 1);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    fine.push_back(nodes[j]);
    fine.push_back(0.5 * (nodes[j] + nodes[j + 1]));
  }
  fine.push_back(nodes.back());
  return fine;
}

}  // namespace

Mesh::Mesh(std::vector<double> nodes, BoundaryKind bc) : nodes_(std::move(nodes)), bc_(bc) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("mesh needs at least two nodes");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("mesh nodes must be strictly increasing (node " +
                                  std::to_string(i) + ")");
    }
  }
  if (unknown_count() == 0) {
    throw std::invalid_argument("mesh carries no unknowns");
  }
}

Mesh Mesh::uniform(Interval domain, std::size_t intervals, BoundaryKind bc) {
  if (intervals == 0 || !(domain.right > domain.left)) {
    throw std::invalid_argument("uniform mesh needs a non-empty domain and at least one interval");
  }
  std::vector<double> nodes(intervals + 1);
  const double h = domain.length() / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    nodes[i] = domain.left + static_cast<double>(i) * h;
  }
  nodes.back() = domain.right;
  return Mesh(std::move(nodes), bc);
}

std::size_t Mesh::unknown_count() const {
  if (bc_ == BoundaryKind::neumann) {
    return nodes_.size();
  }
  return nodes_.size() >= 2 ? nodes_.size() - 2 : 0;
}

std::vector<double> Mesh::unknown_coordinates() const {
  const auto first = first_unknown();
  return {nodes_.begin() + static_cast<std::ptrdiff_t>(first),
          nodes_.begin() + static_cast<std::ptrdiff_t>(first + unknown_count())};
}

std::vector<double> Mesh::norm_weights() const {
  std::vector<double> w(unknown_count());
  const std::size_t last = node_count() - 1;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const std::size_t i = node_of_unknown(k);
    const double left = i > 0 ? spacing(i) : 0.0;
    const double right = i < last ? spacing(i + 1) : 0.0;
    w[k] = 0.5 * (left + right);
  }
  return w;
}

std::size_t intervals_for_unknowns(std::size_t unknowns, BoundaryKind bc) {
  if (bc == BoundaryKind::dirichlet) {
    return unknowns + 1;
  }
  if (unknowns < 2) {
    throw std::invalid_argument("a Neumann mesh needs at least two unknowns");
  }
  return unknowns - 1;
}

std::size_t unknowns_for_intervals(std::size_t intervals, BoundaryKind bc) {
  return bc == BoundaryKind::dirichlet ? intervals - 1 : intervals + 1;
}

double l2_norm(const Mesh& mesh, std::span<const double> values) {
  if (mesh.unknown_count() < 1) {
    throw std::domain_error("l2_norm: mesh has no weighted nodes");
  }
  if (values.size() != mesh.unknown_count()) {
    throw std::invalid_argument("l2_norm: grid function size does not match the mesh");
  }
  const std::size_t last = mesh.node_count() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t i = mesh.node_of_unknown(k);
    const double left = i > 0 ? mesh.spacing(i) : 0.0;
    const double right = i < last ? mesh.spacing(i + 1) : 0.0;
    sum += 0.5 * (left + right) * values[k] * values[k];
  }
  return std::sqrt(sum);
}

MeshPair MeshPair::from_coarse(Mesh coarse) {
  MeshPair pair;
  pair.fine_ = Mesh(bisect(coarse.nodes()), coarse.boundary());
  pair.coarse_ = std::move(coarse);
  return pair;
}

MeshPair MeshPair::uniform(Interval domain, std::size_t fine_unknowns, BoundaryKind bc) {
  const std::size_t fine_intervals = intervals_for_unknowns(fine_unknowns, bc);
  if (fine_intervals % 2 != 0) {
    throw std::invalid_argument("fine mesh with " + std::to_string(fine_unknowns) +
                                " unknowns has an odd interval count (" +
                                std::to_string(fine_intervals) + ") and no coarse parent");
  }
  return from_coarse(Mesh::uniform(domain, fine_intervals / 2, bc));
}

std::size_t MeshPair::fine_unknown_of_coarse(std::size_t k) const {
  const std::size_t first = coarse_.first_unknown();
  return 2 * (k + first) - first;
}

std::vector<double> MeshPair::restrict_to_coarse(std::span<const double> fine_values) const {
  if (fine_values.size() != fine_.unknown_count()) {
    throw std::invalid_argument("restrict_to_coarse: grid function does not live on the fine level");
  }
  std::vector<double> out(coarse_.unknown_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = fine_values[fine_unknown_of_coarse(k)];
  }
  return out;
}

std::vector<double> MeshPair::inject_to_fine(std::span<const double> coarse_values) const {
  if (coarse_values.size() != coarse_.unknown_count()) {
    throw std::invalid_argument("inject_to_fine: grid function does not live on the coarse level");
  }
  std::vector<double> out(fine_.unknown_count(), 0.0);
  for (std::size_t k = 0; k < coarse_values.size(); ++k) {
    out[fine_unknown_of_coarse(k)] = coarse_values[k];
  }
  return out;
}

std::vector<std::size_t> MeshPair::midpoint_nodes() const {
  std::vector<std::size_t> out(coarse_.interval_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = 2 * k + 1;
  }
  return out;
}

std::vector<double> smooth_nodes(std::vector<double> nodes) {
  bool changed = true;
  bool forward = true;
  while (changed) {
    changed = false;
    const std::size_t intervals = nodes.size() - 1;
    std::vector<bool> split(intervals, false);
    auto check = [&](std::size_t k) {
      const double left = nodes[k] - nodes[k - 1];
      const double right = nodes[k + 1] - nodes[k];
      if (right > 2.0 * left * (1.0 + kRatioSlack)) {
        split[k] = true;
      } else if (left > 2.0 * right * (1.0 + kRatioSlack)) {
        split[k - 1] = true;
      }
    };
    if (forward) {
      for (std::size_t k = 1; k < intervals; ++k) check(k);
    } else {
      for (std::size_t k = intervals - 1; k >= 1; --k) check(k);
    }
    forward = !forward;
    std::vector<double> next;
    next.reserve(nodes.size() * 2);
    for (std::size_t k = 0; k < intervals; ++k) {
      next.push_back(nodes[k]);
      if (split[k]) {
        next.push_back(0.5 * (nodes[k] + nodes[k + 1]));
        changed = true;
      }
    }
    next.push_back(nodes.back());
    nodes = std::move(next);
  }
  return nodes;
}

bool satisfies_ratio_bound(const Mesh& mesh) {
  for (std::size_t i = 2; i < mesh.node_count(); ++i) {
    const double ratio = mesh.spacing(i) / mesh.spacing(i - 1);
    if (ratio < 0.5 * (1.0 - kRatioSlack) || ratio > 2.0 * (1.0 + kRatioSlack)) {
      return false;
    }
  }
  return true;
}

MeshPair adapt_coarse_mesh(const MeshPair& pair, const AdaptMarks& marks) {
  const Mesh& coarse = pair.coarse();
  const std::size_t intervals = coarse.interval_count();
  const std::size_t fine_nodes = pair.fine().node_count();

  auto to_interval = [&](std::size_t fine_node) {
    if (fine_node % 2 == 0 || fine_node >= fine_nodes) {
      throw std::invalid_argument("adapt_coarse_mesh: mark on fine node " +
                                  std::to_string(fine_node) + " which is not a midpoint");
    }
    return fine_node / 2;
  };
  std::vector<bool> refine(intervals, false);
  std::vector<bool> coarsen(intervals, false);
  for (auto i : marks.refine) refine[to_interval(i)] = true;
  for (auto i : marks.coarsen) coarsen[to_interval(i)] = true;

  // Coarse node j sits between intervals j-1 and j.
  std::vector<bool> remove(coarse.node_count(), false);
  std::size_t remaining = intervals;
  auto h = [&](std::size_t k) { return coarse.spacing(k + 1); };
  for (std::size_t j = 1; j + 1 < coarse.node_count(); ++j) {
    if (remaining <= 2) break;
    const std::size_t l = j - 1;
    const std::size_t r = j;
    if (!coarsen[l] || !coarsen[r] || refine[l] || refine[r]) continue;
    if (!nearly_equal(h(l), h(r))) continue;
    // Only undo a bisection: the merged interval must start on the dyadic
    // grid of its new width, otherwise the neighbours of the pair are
    // orphaned and can never be merged again.
    const double slot = (coarse.node(l) - coarse.node(0)) / (h(l) + h(r));
    if (std::abs(slot - std::round(slot)) > 1e-6) continue;
    const double merged = h(l) + h(r);
    // A merge that immediately breaks the ratio bound would be undone by smoothing.
    if (l > 0 && merged > 2.0 * h(l - 1) * (1.0 + kRatioSlack)) continue;
    if (r + 1 < intervals && merged > 2.0 * h(r + 1) * (1.0 + kRatioSlack)) continue;
    if (l > 0 && remove[j - 1]) continue;
    remove[j] = true;
    --remaining;
    ++j;  // interval r is consumed
  }

  std::vector<double> nodes;
  nodes.reserve(2 * coarse.node_count());
  for (std::size_t j = 0; j < coarse.node_count(); ++j) {
    if (remove[j]) continue;
    nodes.push_back(coarse.node(j));
    if (j + 1 < coarse.node_count() && refine[j]) {
      nodes.push_back(0.5 * (coarse.node(j) + coarse.node(j + 1)));
    }
  }
  nodes = smooth_nodes(std::move(nodes));
  return MeshPair::from_coarse(Mesh(std::move(nodes), coarse.boundary()));
}

std::vector<double> nodal_slopes(std::span<const double> nodes, std::span<const double> values) {
  const std::size_t n = nodes.size();
  if (values.size() != n) {
    throw std::invalid_argument("nodal_slopes: size mismatch");
  }
  if (n < 2) {
    throw std::invalid_argument("nodal_slopes: need at least two nodes");
  }
  const std::size_t width = std::min<std::size_t>(5, n);
  std::vector<double> slopes(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start = i >= 2 ? i - 2 : 0;
    start = std::min(start, n - width);
    const double x = nodes[i];
    double d = 0.0;
    for (std::size_t j = start; j < start + width; ++j) {
      // Derivative at x_i of the Lagrange basis polynomial for node j.
      double weight;
      if (j == i) {
        weight = 0.0;
        for (std::size_t m = start; m < start + width; ++m) {
          if (m != i) weight += 1.0 / (x - nodes[m]);
        }
      } else {
        double num = 1.0;
        double den = 1.0;
        for (std::size_t m = start; m < start + width; ++m) {
          if (m == j) continue;
          den *= nodes[j] - nodes[m];
          if (m != i) num *= x - nodes[m];
        }
        weight = num / den;
      }
      d += weight * values[j];
    }
    slopes[i] = d;
  }
  return slopes;
}

std::vector<double> transfer_solution(std::span<const double> values, const Mesh& from,
                                      const Mesh& to) {
  if (values.size() != from.node_count()) {
    throw std::invalid_argument("transfer_solution: values must cover every node of the old mesh");
  }
  const auto old_nodes = from.nodes();
  const double a = old_nodes.front();
  const double b = old_nodes.back();
  const double slack = 1e-12 * (b - a);
  const auto slopes = nodal_slopes(old_nodes, values);

  std::vector<double> out(to.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = to.node(i);
    if (x < a - slack || x > b + slack) {
      throw std::domain_error("transfer_solution: node outside the old domain");
    }
    auto it = std::upper_bound(old_nodes.begin(), old_nodes.end(), x);
    std::size_t k = static_cast<std::size_t>(it - old_nodes.begin());
    k = std::clamp<std::size_t>(k, 1, old_nodes.size() - 1);
    const double x0 = old_nodes[k - 1];
    const double h = old_nodes[k] - x0;
    const double s = std::clamp((x - x0) / h, 0.0, 1.0);
    if (s == 0.0) {
      out[i] = values[k - 1];
      continue;
    }
    if (s == 1.0) {
      out[i] = values[k];
      continue;
    }
    const double s2 = s * s;
    const double s3 = s2 * s;
    out[i] = (2 * s3 - 3 * s2 + 1) * values[k - 1] + (-2 * s3 + 3 * s2) * values[k] +
             h * (s3 - 2 * s2 + s) * slopes[k - 1] + h * (s3 - s2) * slopes[k];
  }
  return out;
}

void write_nodes(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(17);
  for (double x : mesh.nodes()) out << x << '\n';
}

Mesh read_nodes(std::istream& in, BoundaryKind bc) {
  std::vector<double> nodes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      nodes.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw std::runtime_error("read_nodes: bad coordinate on line " + std::to_string(line_no));
    }
  }
  return Mesh(std::move(nodes), bc);
}

}  // namespace molgec
