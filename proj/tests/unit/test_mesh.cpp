#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "molgec/mesh.hpp"

using namespace molgec;
using doctest::Approx;

namespace {

std::vector<double> sample(const Mesh& m, double (*f)(double)) {
  std::vector<double> out;
  for (double x : m.nodes()) out.push_back(f(x));
  return out;
}

}  // namespace

TEST_CASE("l2 norm on a uniform mesh") {
  const auto m = Mesh::uniform({0.0, 1.0}, 4, BoundaryKind::dirichlet);
  REQUIRE(m.unknown_count() == 3);
  const std::vector<double> y{2.0, 2.0, 2.0};
  CHECK(l2_norm(m, y) == Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(l2_norm(m, std::vector<double>(3, 0.0)) == 0.0);
}

TEST_CASE("l2 norm on a non-uniform mesh") {
  const Mesh m({0.0, 0.1, 0.3, 0.6}, BoundaryKind::dirichlet);
  const std::vector<double> y{1.0, 1.0};
  CHECK(l2_norm(m, y) == Approx(0.6324555320336759).epsilon(1e-12));
}

TEST_CASE("neumann norm weights give boundary unknowns half an interval") {
  const auto m = Mesh::uniform({0.0, 1.0}, 4, BoundaryKind::neumann);
  const auto w = m.norm_weights();
  REQUIRE(w.size() == 5);
  CHECK(w.front() == Approx(0.125));
  CHECK(w[2] == Approx(0.25));
  CHECK(w.back() == Approx(0.125));
}

TEST_CASE("uniform pair sizes") {
  SUBCASE("dirichlet 51") {
    const auto p = MeshPair::uniform({0.0, 1.0}, 51, BoundaryKind::dirichlet);
    CHECK(p.fine().interval_count() == 52);
    CHECK(p.fine().spacing(1) == Approx(1.0 / 52));
    CHECK(p.coarse().interval_count() == 26);
    CHECK(p.coarse().unknown_count() == 25);
  }
  SUBCASE("neumann 25") {
    const auto p = MeshPair::uniform({0.0, 1.0}, 25, BoundaryKind::neumann);
    CHECK(p.fine().interval_count() == 24);
    CHECK(p.coarse().interval_count() == 12);
    CHECK(p.coarse().unknown_count() == 13);
  }
  SUBCASE("dirichlet 103 on [0, 2.5]") {
    const auto p = MeshPair::uniform({0.0, 2.5}, 103, BoundaryKind::dirichlet);
    CHECK(p.fine().spacing(7) == Approx(2.5 / 104));
  }
  SUBCASE("odd fine interval count has no parent") {
    CHECK_THROWS(MeshPair::uniform({0.0, 1.0}, 50, BoundaryKind::dirichlet));
  }
}

TEST_CASE("restriction is injection") {
  const auto p = MeshPair::uniform({0.0, 1.0}, 25, BoundaryKind::neumann);
  std::vector<double> idx(p.fine().unknown_count());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
  const auto c = p.restrict_to_coarse(idx);
  REQUIRE(c.size() == p.coarse().unknown_count());
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == 2.0 * k);

  const auto d = MeshPair::uniform({0.0, 1.0}, 51, BoundaryKind::dirichlet);
  std::vector<double> s;
  for (double x : d.fine().unknown_coordinates()) s.push_back(std::sin(std::numbers::pi * x));
  const auto cs = d.restrict_to_coarse(s);
  const auto xc = d.coarse().unknown_coordinates();
  for (std::size_t k = 0; k < cs.size(); ++k) CHECK(cs[k] == std::sin(std::numbers::pi * xc[k]));

  CHECK(d.restrict_to_coarse(std::vector<double>(51, 7.0)) == std::vector<double>(25, 7.0));
  CHECK_THROWS(d.restrict_to_coarse(std::vector<double>(25, 1.0)));
}

TEST_CASE("adapting the coarse mesh") {
  const auto p = MeshPair::from_coarse(Mesh::uniform({0.0, 1.0}, 4, BoundaryKind::dirichlet));

  SUBCASE("no marks is the identity") {
    const auto q = adapt_coarse_mesh(p, {});
    CHECK(q.coarse() == p.coarse());
    CHECK(q.fine() == p.fine());
  }
  SUBCASE("one refine mark splits one interval without cascade") {
    // interval 2 of 4 (1-based) has fine midpoint node 3
    const auto q = adapt_coarse_mesh(p, {{3}, {}});
    const std::vector<double> want{0.0, 0.25, 0.375, 0.5, 0.75, 1.0};
    REQUIRE(q.coarse().node_count() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(q.coarse().node(i) == Approx(want[i]));
    CHECK(satisfies_ratio_bound(q.coarse()));
    CHECK(q.fine().interval_count() == 2 * q.coarse().interval_count());
  }
  SUBCASE("coarsen marks on a sibling pair remove the shared node") {
    // intervals 2 and 3 (0-based) share node 0.75 and form a dyadic pair
    const auto q = adapt_coarse_mesh(p, {{}, {5, 7}});
    const std::vector<double> want{0.0, 0.25, 0.5, 1.0};
    REQUIRE(q.coarse().node_count() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(q.coarse().node(i) == Approx(want[i]));
  }
  SUBCASE("marks must sit on midpoints") {
    CHECK_THROWS(adapt_coarse_mesh(p, {{2}, {}}));
  }
}

TEST_CASE("smoothing restores the ratio bound") {
  const auto nodes = smooth_nodes({0.0, 0.01, 1.0});
  const Mesh m(nodes, BoundaryKind::dirichlet);
  CHECK(satisfies_ratio_bound(m));
  CHECK(m.node(1) == 0.01);
}

TEST_CASE("hermite transfer") {
  const auto from = Mesh::uniform({0.0, 1.0}, 16, BoundaryKind::dirichlet);
  SUBCASE("identity") {
    const auto v = sample(from, [](double x) { return std::exp(x); });
    const auto w = transfer_solution(v, from, from);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == Approx(v[i]).epsilon(1e-15));
  }
  SUBCASE("cubics are reproduced") {
    auto cubic = [](double x) { return 1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x; };
    const auto v = sample(from, +cubic);
    const Mesh to({0.0, 0.03, 0.2, 0.41, 0.5, 0.77, 0.9, 1.0}, BoundaryKind::dirichlet);
    const auto w = transfer_solution(v, from, to);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == Approx(cubic(to.node(i))).epsilon(1e-12));
  }
  SUBCASE("fourth order for smooth data") {
    auto f = [](double x) { return std::sin(std::numbers::pi * x); };
    auto err = [&](std::size_t intervals) {
      const auto a = Mesh::uniform({0.0, 1.0}, intervals, BoundaryKind::dirichlet);
      std::vector<double> probe;
      for (std::size_t i = 0; i <= 97; ++i) probe.push_back(i / 97.0);
      const Mesh b(probe, BoundaryKind::dirichlet);
      const auto w = transfer_solution(sample(a, +f), a, b);
      double e = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) e = std::max(e, std::abs(w[i] - f(b.node(i))));
      return e;
    };
    const double ratio = err(64) / err(128);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }
  SUBCASE("target outside the source domain") {
    const Mesh to({-0.1, 0.5, 1.0}, BoundaryKind::dirichlet);
    CHECK_THROWS(transfer_solution(std::vector<double>(17, 0.0), from, to));
  }
}

TEST_CASE("node list round trip") {
  const Mesh m({0.0, 0.1, 0.30000000000000004, 1.0 / 3.0, 1.0}, BoundaryKind::neumann);
  std::stringstream io;
  write_nodes(io, m);
  CHECK(read_nodes(io, BoundaryKind::neumann) == m);
}
