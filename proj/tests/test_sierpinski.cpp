#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mgt/elliptic.hpp"
#include "mgt/fixtures.hpp"
#include "mgt/sierpinski.hpp"

using namespace mgt;

TEST_CASE("level counts and cycle ranks") {
  for (int m = 0; m <= 3; ++m) {
    SGLevelGraph sg = sg_graph(m);
    int pow3 = 1;
    for (int i = 0; i < m; ++i) pow3 *= 3;
    CHECK(sg.graph->vertex_count() == 3 * (pow3 + 1) / 2);
    CHECK(sg.graph->edge_count() == 3 * pow3);
    CHECK(sg.graph->cycle_rank() == (3 * pow3 - 1) / 2);
  }
  SGLevelGraph r1 = sg_graph(1, true);
  CHECK(r1.graph->edge_count() == 8);
  CHECK(r1.graph->cycle_rank() == 3);
  SGLevelGraph r2 = sg_graph(2, true);
  CHECK(r2.graph->edge_count() == 26);
  CHECK(r2.graph->cycle_rank() == 12);
  CHECK_THROWS_WITH_AS(sg_graph(9), doctest::Contains("LEVEL_TOO_LARGE"), Error);
}

TEST_CASE("harmonic extension values and the energy-minimization oracle") {
  SGLevelGraph sg1 = sg_graph(1);
  ContinuousFunction h = sg_harmonic(sg1, 0.0, 1.0, 1.0);
  auto at = [&](int x, int y) {
    for (int v = 0; v < sg1.graph->vertex_count(); ++v)
      if (sg1.coords[v] == std::make_pair(x, y)) return h.vertex_value(v);
    FAIL("vertex not found");
    return 0.0;
  };
  // p0 = midpoint(q1,q2) = (1,0); p1 = midpoint(q2,q0) = (1,1); p2 = (0,1)
  CHECK(at(1, 0) == doctest::Approx(4.0 / 5.0));
  CHECK(at(1, 1) == doctest::Approx(3.0 / 5.0));
  CHECK(at(0, 1) == doctest::Approx(3.0 / 5.0));

  ContinuousFunction hd = sg_harmonic(sg1, 0.0, -1.0 / 6.0, 1.0 / 6.0);
  CHECK(at(1, 0) == doctest::Approx(4.0 / 5.0));  // unchanged handle
  auto atd = [&](int x, int y) {
    for (int v = 0; v < sg1.graph->vertex_count(); ++v)
      if (sg1.coords[v] == std::make_pair(x, y)) return hd.vertex_value(v);
    FAIL("vertex not found");
    return 0.0;
  };
  CHECK(atd(1, 0) == doctest::Approx(0.0));
  CHECK(atd(1, 1) == doctest::Approx(1.0 / 30.0));
  CHECK(atd(0, 1) == doctest::Approx(-1.0 / 30.0));

  // independent oracle: the conductance-Laplacian solve on the same graph
  std::mt19937_64 rng(211);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int m = 1; m <= 3; ++m) {
    SGLevelGraph sg = sg_graph(m);
    double a0 = u(rng), a1 = u(rng), a2 = u(rng);
    ContinuousFunction mid = sg_harmonic(sg, a0, a1, a2);
    ContinuousFunction lap = harmonic_extend(sg.graph, {{"q0", a0}, {"q1", a1}, {"q2", a2}});
    for (int v = 0; v < sg.graph->vertex_count(); ++v)
      CHECK(mid.vertex_value(v) == doctest::Approx(lap.vertex_value(v)).epsilon(1e-12));
    // Kirchhoff-harmonic away from V0
    for (int v = 0; v < sg.graph->vertex_count(); ++v)
      if (!sg.graph->is_boundary(v)) CHECK(std::abs(kirchhoff_slope_residual(mid, v)) <= 1e-12);
  }

  // constant data extends to the constant
  SGLevelGraph sg2 = sg_graph(2);
  ContinuousFunction hc = sg_harmonic(sg2, 0.7, 0.7, 0.7);
  for (int v = 0; v < sg2.graph->vertex_count(); ++v) CHECK(hc.vertex_value(v) == doctest::Approx(0.7));
}

TEST_CASE("normal derivatives and energies are level independent") {
  double e_ref[2] = {0.0, 0.0};
  for (int m = 1; m <= 5; ++m) {
    SGLevelGraph sg = sg_graph(m);
    ContinuousFunction ha = sg_harmonic(sg, 0.0, 1.0, 1.0);
    CHECK(std::abs(normal_derivative(ha, sg.corners[0]) + 2.0) <= 1e-10);
    CHECK(std::abs(normal_derivative(ha, sg.corners[1]) - 1.0) <= 1e-10);
    CHECK(std::abs(normal_derivative(ha, sg.corners[2]) - 1.0) <= 1e-10);
    ContinuousFunction hb = sg_harmonic(sg, 0.0, -1.0 / 6.0, 1.0 / 6.0);
    CHECK(std::abs(normal_derivative(hb, sg.corners[0])) <= 1e-10);
    CHECK(std::abs(normal_derivative(hb, sg.corners[1]) + 0.5) <= 1e-10);
    CHECK(std::abs(normal_derivative(hb, sg.corners[2]) - 0.5) <= 1e-10);
    double ea = dirichlet_energy(ha), eb = dirichlet_energy(hb);
    if (m == 1) {
      e_ref[0] = ea;
      e_ref[1] = eb;
    } else {
      CHECK(ea == doctest::Approx(e_ref[0]).epsilon(1e-10));
      CHECK(eb == doctest::Approx(e_ref[1]).epsilon(1e-10));
    }
  }
}

TEST_CASE("velocity flags across the catalog") {
  SGLevelGraph sg1 = sg_graph(1);
  ContinuousFunction ha = sg_harmonic(sg1, 0.0, 1.0, 1.0);
  VelocityField ba = sg_velocity(sg1, ha);
  CHECK_FALSE(ba.minimal_energy_dominant);  // the edge opposite q0 is flat

  SGLevelGraph r1 = sg_graph(1, true);
  ContinuousFunction har = sg_harmonic(r1, 0.0, 1.0, 1.0);
  VelocityField bar = sg_velocity(r1, har);
  CHECK(bar.minimal_energy_dominant);
  CHECK(bar.divergence_free_wrt_B);

  for (int m = 1; m <= 3; ++m) {
    SGLevelGraph sg = sg_graph(m);
    ContinuousFunction hb = sg_harmonic(sg, 0.0, -1.0 / 6.0, 1.0 / 6.0);
    VelocityField bb = sg_velocity(sg, hb);
    CHECK(bb.minimal_energy_dominant);
    CHECK(bb.divergence_free_wrt_B);
  }
}

TEST_CASE("dzeta at level 1 matches the figure field after orientation") {
  SGLevelGraph sg1 = sg_graph(1);
  std::vector<double> dz = sg_dzeta(sg1, {});
  // outer slopes +-1/6 (six edges), inner slopes +-1/3 (three edges): the
  // -6 multiple of the level-1 field pattern
  int outer = 0, inner = 0;
  const int scale = 2;
  for (int e = 0; e < sg1.graph->edge_count(); ++e) {
    auto [tx, ty] = sg1.coords[sg1.graph->edge(e).tail];
    auto [hx, hy] = sg1.coords[sg1.graph->edge(e).head];
    bool on_rim = (tx == 0 && hx == 0) || (ty == 0 && hy == 0) || (tx + ty == scale && hx + hy == scale);
    if (on_rim) {
      CHECK(std::abs(dz[e]) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
      ++outer;
    } else {
      CHECK(std::abs(dz[e]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
      ++inner;
    }
  }
  CHECK(outer == 6);
  CHECK(inner == 3);
}

TEST_CASE("dzeta forms are divergence free and pairwise orthogonal") {
  SGLevelGraph sg2 = sg_graph(2);
  std::vector<std::vector<int>> words = {{}, {0}, {1}, {2}};
  std::vector<std::vector<double>> forms;
  for (const auto& w : words) forms.push_back(sg_dzeta(sg2, w));
  for (const auto& fm : forms) {
    VelocityField vf = check_field(sg2.graph, fm);
    CHECK(vf.solenoidal);
  }
  for (size_t i = 0; i < forms.size(); ++i)
    for (size_t j = i + 1; j < forms.size(); ++j) {
      EdgeFunction a = EdgeFunction::edge_constants(sg2.graph, forms[i]);
      EdgeFunction b = EdgeFunction::edge_constants(sg2.graph, forms[j]);
      CHECK(std::abs(h_inner(a, b)) <= 1e-12);
    }
  CHECK_THROWS_WITH_AS(sg_dzeta(sg2, {0, 1}), doctest::Contains("LEVEL_INSUFFICIENT"), Error);
}

TEST_CASE("cylindrical solutions") {
  SGLevelGraph sg2 = sg_graph(2);
  auto profile = [](double y) { return std::sin(2.0 * M_PI * y); };
  EdgeFunction v0 = cylindrical_solution(sg2, SgCase::degenerate, profile, 0.0, 64);
  // t = 0 gives the plain pull-back
  auto data = sg_case_data(SgCase::degenerate);
  ContinuousFunction h = sg_harmonic(sg2, data[0], data[1], data[2]);
  for (int e = 0; e < sg2.graph->edge_count(); ++e)
    CHECK(v0.eval(e, 0.5) == doctest::Approx(profile(h.eval(e, 0.5))).epsilon(1e-12));

  // constants stay put
  EdgeFunction c0 = cylindrical_solution(sg2, SgCase::degenerate, [](double) { return 2.0; }, 0.0, 16);
  EdgeFunction c1 = cylindrical_solution(sg2, SgCase::degenerate, [](double) { return 2.0; }, 0.77, 16);
  EdgeFunction diff = c1 - c0;
  CHECK(diff.max_abs_value() <= 1e-15);

  CHECK_THROWS_WITH_AS(cylindrical_solution(sg2, SgCase::degenerate, [](double y) { return y; }, 0.0, 16),
                       doctest::Contains("PROFILE_NOT_PERIODIC"), Error);
}

TEST_CASE("convergence experiment") {
  auto profile = [](double y) { return std::sin(2.0 * M_PI * y); };
  auto rows = convergence_experiment(profile, 2.0 * M_PI, SgCase::degenerate, {1, 2, 3, 4, 5});
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].sup_error < rows[i - 1].sup_error);
  for (const auto& r : rows) CHECK(r.sup_error <= r.osc_bound + 1e-12);

  auto flat = convergence_experiment([](double) { return 1.0; }, 0.0, SgCase::degenerate, {1, 2});
  for (const auto& r : flat) CHECK(r.sup_error <= 1e-15);

  std::string csv = convergence_to_csv(rows);
  CHECK(csv.find("level,sup_error,osc_bound") == 0);
}
