#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mgt/decomp.hpp"
#include "mgt/fixtures.hpp"
#include "mgt/poly.hpp"
#include "mgt/sierpinski.hpp"

using namespace mgt;

TEST_CASE("harmonic extension on the interval and the star tree") {
  Fixture in = fixture("interval");
  ContinuousFunction h = harmonic_extend(in.graph, {{"q0", 0.0}, {"q1", 2.5}});
  CHECK(h.eval(0, 0.4) == doctest::Approx(1.0).epsilon(1e-14));

  Fixture tree = fixture("star-tree");
  ContinuousFunction ht = harmonic_extend(tree.graph, {{"q0", 0.0}, {"q1", 1.0}, {"q2", 1.0}});
  CHECK(ht.vertex_value(tree.graph->vertex_index("p")) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  ContinuousFunction hc = harmonic_extend(tree.graph, {{"q0", 3.0}, {"q1", 3.0}, {"q2", 3.0}});
  for (int v = 0; v < tree.graph->vertex_count(); ++v) CHECK(hc.vertex_value(v) == doctest::Approx(3.0));

  Fixture circles = fixture("circles");
  CHECK_THROWS_AS(harmonic_extend(circles.graph, std::vector<double>{}), Error);
}

TEST_CASE("harmonic extension obeys the maximum principle") {
  Fixture fx = fixture("sg2");
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> bv = {u(rng), u(rng), u(rng)};
    ContinuousFunction h = harmonic_extend(fx.graph, bv);
    double lo = std::min({bv[0], bv[1], bv[2]}), hi = std::max({bv[0], bv[1], bv[2]});
    for (int v = 0; v < fx.graph->vertex_count(); ++v) {
      CHECK(h.vertex_value(v) >= lo - 1e-12);
      CHECK(h.vertex_value(v) <= hi + 1e-12);
    }
  }
}

TEST_CASE("neumann: zero data gives zero") {
  Fixture tree = fixture("star-tree");
  ContinuousFunction u = solve_neumann_constants(tree.field, {0, 0, 0}, {0, 0, 0});
  for (int v = 0; v < tree.graph->vertex_count(); ++v) CHECK(std::abs(u.vertex_value(v)) <= 1e-14);
}

TEST_CASE("neumann: k1 with z = z0 phi0 reproduces the closed-form slopes") {
  Fixture k1 = fixture("k1");
  auto idx = [&](const std::string& id) { return k1.graph->edge_index(id); };
  double z0 = 0.7;
  std::vector<double> z(9, 0.0);
  z[idx("q0p2")] = z0;
  z[idx("p1p2")] = -0.5 * z0;
  z[idx("p1q0")] = z0;
  ContinuousFunction u = solve_neumann_constants(k1.field, z, {});
  EdgeFunction du = u.edge_function().derivative();
  // u'_{p1q0}(x) = z0 x - z0, u'_{q0p2}(x) = z0 x, (1/2) u'_{p1p2}(x) = -z0 x + z0/2;
  // the constant term of the third slope is forced by continuity of u around
  // the triangle and by the flux balance at p1
  CHECK(du.eval(idx("p1q0"), 0.0) == doctest::Approx(-z0).epsilon(1e-12));
  CHECK(du.eval(idx("p1q0"), 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(du.eval(idx("q0p2"), 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(du.eval(idx("q0p2"), 1.0) == doctest::Approx(z0).epsilon(1e-12));
  CHECK(0.5 * du.eval(idx("p1p2"), 0.0) == doctest::Approx(0.5 * z0).epsilon(1e-12));
  CHECK(0.5 * du.eval(idx("p1p2"), 1.0) == doctest::Approx(-0.5 * z0).epsilon(1e-12));
  for (const auto& other : {"p2q1", "q1p0", "p0q2", "q2p1", "p0p1", "p2p0"})
    CHECK(std::abs(du.eval(idx(other), 0.37)) <= 1e-12);
}

TEST_CASE("neumann rejects incompatible data and non-constant rhs") {
  Fixture tree = fixture("star-tree");
  CHECK_THROWS_WITH_AS(solve_neumann_constants(tree.field, {0, 0, 0}, {1e-3, 0, 0}),
                       doctest::Contains("INCOMPATIBLE_DATA"), Error);
  NeumannProblem p{tree.field, EdgeFunction::poly(tree.graph, {{0.0, 1.0}, {0.0}, {0.0}}), {}};
  CHECK_THROWS_WITH_AS(solve_neumann(p), doctest::Contains("UNSUPPORTED_RHS"), Error);
}

TEST_CASE("neumann postconditions as residuals") {
  Fixture tree = fixture("star-tree");
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> z = {ud(rng), ud(rng), ud(rng)};
    // compatible eta: distribute int z dnu_b over the boundary
    double mass = 0.0;
    for (int e = 0; e < 3; ++e) mass += tree.field.nu_weights[e] * z[e];
    std::vector<double> eta = {mass - 2.0 * 0.1, 0.1, 0.1};
    ContinuousFunction u = solve_neumann_constants(tree.field, z, eta);
    // normal derivatives match the data
    for (size_t i = 0; i < tree.graph->boundary().size(); ++i)
      CHECK(normal_derivative(u, tree.graph->boundary()[i]) == doctest::Approx(eta[i]).epsilon(1e-10));
    // interior slope balance
    CHECK(std::abs(kirchhoff_slope_residual(u, tree.graph->vertex_index("p"))) <= 1e-12);
    // edge-wise curvature u'' = b^2 z
    for (int e = 0; e < 3; ++e) {
      const auto& c = u.edge_function().edge_data(e);
      double curv = c.size() > 2 ? 2.0 * c[2] : 0.0;
      CHECK(curv == doctest::Approx(tree.field.b[e] * tree.field.b[e] * z[e]).epsilon(1e-12));
    }
  }
}

TEST_CASE("normal derivative on the interval and sg levels") {
  Fixture in = fixture("interval");
  ContinuousFunction u = ContinuousFunction::interpolate(in.graph, {0.0, 1.0});
  CHECK(normal_derivative(u, in.graph->vertex_index("q1")) == doctest::Approx(1.0));
  CHECK(normal_derivative(u, in.graph->vertex_index("q0")) == doctest::Approx(-1.0));

  for (int m = 1; m <= 5; ++m) {
    SGLevelGraph sg = sg_graph(m);
    ContinuousFunction h = sg_harmonic(sg, 0.0, -1.0 / 6.0, 1.0 / 6.0);
    CHECK(std::abs(normal_derivative(h, sg.corners[0]) - 0.0) <= 1e-10);
    CHECK(std::abs(normal_derivative(h, sg.corners[1]) + 0.5) <= 1e-10);
    CHECK(std::abs(normal_derivative(h, sg.corners[2]) - 0.5) <= 1e-10);
  }
}

TEST_CASE("gauss-green identity for quadratic-laplacian functions") {
  Fixture tree = fixture("star-tree");
  const auto& g = tree.graph;
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z = {ud(rng), ud(rng), ud(rng)};
    double mass = 0.0;
    for (int e = 0; e < 3; ++e) mass += tree.field.nu_weights[e] * z[e];
    std::vector<double> eta = {mass / 3.0, mass / 3.0, mass / 3.0};
    ContinuousFunction u = solve_neumann_constants(tree.field, z, eta);
    std::vector<double> pv(g->vertex_count());
    for (double& x : pv) x = ud(rng);
    ContinuousFunction phi = ContinuousFunction::interpolate(g, pv);

    double lhs = 0.0;
    for (size_t i = 0; i < g->boundary().size(); ++i)
      lhs += normal_derivative(u, g->boundary()[i]) * phi.vertex_value(g->boundary()[i]);
    // E(u, phi) + int (Delta u) phi dnu_b
    EdgeFunction du = u.edge_function().derivative();
    EdgeFunction dphi = phi.edge_function().derivative();
    double rhs = h_inner(du, dphi) +
                 l2nu_inner(EdgeFunction::edge_constants(g, z), phi.edge_function(), tree.field);
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}
