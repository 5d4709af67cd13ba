#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mgt/fixtures.hpp"
#include "mgt/generator.hpp"
#include "mgt/poly.hpp"

using namespace mgt;

namespace {

std::vector<double> random_poly(std::mt19937_64& rng, int deg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(deg + 1);
  for (double& x : c) x = u(rng);
  return c;
}

EdgeFunction random_domain_element(const Fixture& fx, std::mt19937_64& rng, int deg = 7) {
  const auto& g = fx.graph;
  const int ne = g->edge_count();
  Eigen::MatrixXd C(g->interior_count(), 2 * ne);
  int row = 0;
  for (int v = 0; v < g->vertex_count(); ++v) {
    if (g->is_boundary(v)) continue;
    C.row(row).setZero();
    for (int e : g->edges_in(v)) C(row, 2 * e + 1) += g->edge(e).conductance * fx.field.b[e];
    for (int e : g->edges_out(v)) C(row, 2 * e) -= g->edge(e).conductance * fx.field.b[e];
    ++row;
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd t(2 * ne);
  for (int i = 0; i < 2 * ne; ++i) t(i) = u(rng);
  if (row > 0) {
    Eigen::MatrixXd Ct = C.topRows(row);
    t -= Ct.transpose() * (Ct * Ct.transpose()).ldlt().solve(Ct * t);
  }
  std::vector<std::vector<double>> data(ne);
  for (int e = 0; e < ne; ++e) {
    auto c = random_poly(rng, deg);
    double v0 = poly::eval(c, 0.0), v1 = poly::eval(c, 1.0);
    if (c.size() < 2) c.resize(2, 0.0);
    c[0] += t(2 * e) - v0;
    c[1] += (t(2 * e + 1) - v1) - (t(2 * e) - v0);
    data[e] = c;
  }
  return EdgeFunction::poly(g, data);
}

const std::vector<std::string> kSweepFixtures = {"interval", "circles", "star-tree", "k1", "sg2",
                                                 "sg2-reduced"};

}  // namespace

TEST_CASE("interval quadruple: one-dimensional spaces, G- = f(1), G+ = -f(0)") {
  Fixture in = fixture("interval");
  QuadrupleSpaces qs = QuadrupleSpaces::build(in.field);
  CHECK_FALSE(qs.solenoidal());
  CHECK(qs.dim_hminus() == 1);
  CHECK(qs.dim_hplus() == 1);
  CHECK(qs.partition().neg.size() == 1);  // q0
  CHECK(qs.partition().pos.size() == 1);  // q1

  std::mt19937_64 rng(91);
  EdgeFunction f = EdgeFunction::poly(in.graph, {random_poly(rng, 6)});
  Eigen::VectorXd gm = qs.apply_G_onb(Side::minus, f);
  Eigen::VectorXd gp = qs.apply_G_onb(Side::plus, f);
  CHECK(gm(0) == doctest::Approx(f.value1(0)).epsilon(1e-12));
  CHECK(gp(0) == doctest::Approx(-f.value0(0)).epsilon(1e-12));
}

TEST_CASE("k1 quadruple: solenoidal, dim 3") {
  Fixture k1 = fixture("k1");
  QuadrupleSpaces qs = QuadrupleSpaces::build(k1.field);
  CHECK(qs.solenoidal());
  CHECK(qs.kernel_rank() == 4);
  CHECK(qs.dim_hminus() == 3);

  // G-/G+ coordinates are (w_i +- z_i)/sqrt(2) in the phi basis: check via a
  // decomposition
  std::mt19937_64 rng(93);
  EdgeFunction f = random_domain_element(k1, rng);
  KeyDecomposition kd = key_decompose(f, k1.field);
  Eigen::VectorXd gm = qs.apply_G(Side::minus, f);
  Eigen::VectorXd gp = qs.apply_G(Side::plus, f);
  // raw kernel sections hold coordinates of (w + z)/sqrt(2) and (w - z)/sqrt(2)
  std::vector<double> wz(k1.graph->edge_count());
  for (int e = 0; e < 9; ++e) wz[e] = (kd.w[e] + kd.z[e]) / std::sqrt(2.0);
  Eigen::VectorXd expect = qs.kernel_coords(wz);
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(qs.raw_dim());
  raw.tail(qs.kernel_rank()) = expect;
  Eigen::VectorXd projected = qs.project(Side::minus, raw);
  for (int i = 0; i < qs.raw_dim(); ++i) CHECK(gm(i) == doctest::Approx(projected(i)).epsilon(1e-9));
}

TEST_CASE("sg degenerate boundary weights carry the paper inner product") {
  // boundary data (1/2, 0, 1): n_B b = (0, -3/2, 3/2); after scaling by the
  // harmonic data (0,-1/6,1/6) this is the x0y0 + x1y1/2 + x2y2/2 pattern
  Fixture fx = fixture("sg2");
  QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
  CHECK_FALSE(qs.solenoidal());
  CHECK(qs.partition().zero.size() == 1);
  CHECK(qs.partition().neg.size() == 1);
  CHECK(qs.partition().pos.size() == 1);
  CHECK(qs.partition().weight_neg[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(qs.partition().weight_pos[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(qs.partition().balance_defect <= 1e-10);
}

TEST_CASE("star tree: G- lists the leaf traces") {
  Fixture tree = fixture("star-tree");
  QuadrupleSpaces qs = QuadrupleSpaces::build(tree.field);
  std::mt19937_64 rng(97);
  EdgeFunction f = random_domain_element(tree, rng);
  Eigen::VectorXd gm = qs.apply_G(Side::minus, f);
  // raw layout: [q0 | q1 q2]; the projection removes the q0 direction
  CHECK(gm(0) == doctest::Approx(0.0).epsilon(1e-11));
  CHECK(gm(1) == doctest::Approx(f.value1(tree.graph->edge_index("e1"))).epsilon(1e-10));
  CHECK(gm(2) == doctest::Approx(f.value1(tree.graph->edge_index("e2"))).epsilon(1e-10));
}

TEST_CASE("quadruple identity across fixtures") {
  std::mt19937_64 rng(101);
  for (const auto& name : kSweepFixtures) {
    Fixture fx = fixture(name);
    QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
    for (int trial = 0; trial < 10; ++trial) {
      EdgeFunction f1 = random_domain_element(fx, rng);
      EdgeFunction f2 = random_domain_element(fx, rng);
      CHECK(qs.identity_check(f1, f2) <= 1e-9);
    }
  }
}

TEST_CASE("interval identity closed form") {
  Fixture in = fixture("interval");
  QuadrupleSpaces qs = QuadrupleSpaces::build(in.field);
  std::mt19937_64 rng(103);
  EdgeFunction f = EdgeFunction::poly(in.graph, {random_poly(rng, 6)});
  Eigen::VectorXd gm = qs.apply_G(Side::minus, f), gp = qs.apply_G(Side::plus, f);
  double rhs = qs.raw_inner(gp, gp) - qs.raw_inner(gm, gm);
  CHECK(rhs == doctest::Approx(f.value0(0) * f.value0(0) - f.value1(0) * f.value1(0)).epsilon(1e-10));
}

TEST_CASE("gauge invariance of the G maps") {
  std::mt19937_64 rng(107);
  for (const auto& name : kSweepFixtures) {
    Fixture fx = fixture(name);
    QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
    CycleBasis basis = cycle_basis(fx.graph);
    EdgeFunction f = random_domain_element(fx, rng);
    KeyDecomposition kd = key_decompose(f, fx.field, basis);

    // shifted representation: g+c, u - c h, w - c star^{-1} v
    const double c = 0.8375;
    KeyDecomposition shifted = kd;
    for (size_t i = 0; i < shifted.g_b.size(); ++i) shifted.g_b[i] += c;
    for (size_t i = 0; i < fx.graph->boundary().size(); ++i) {
      double dhq = 0.0;
      {
        // (dh)_B = n_B b on the boundary
        dhq = normal_part_field(fx.field, fx.graph->boundary()[i]);
      }
      shifted.du_b[i] -= c * dhq;
    }
    const auto& v = qs.cycle_part();
    for (int e = 0; e < fx.graph->edge_count(); ++e) shifted.w[e] -= c * v[e] / fx.field.b[e];

    for (Side s : {Side::minus, Side::plus}) {
      Eigen::VectorXd a = qs.apply_G_from_decomposition(s, kd);
      Eigen::VectorXd b2 = qs.apply_G_from_decomposition(s, shifted);
      Eigen::VectorXd direct = qs.apply_G(s, f);
      CHECK((a - b2).norm() <= 1e-10 * std::max(1.0, a.norm()));
      CHECK((a - direct).norm() <= 1e-9 * std::max(1.0, a.norm()));
    }
  }
}

TEST_CASE("surjectivity round trip") {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& name : kSweepFixtures) {
    Fixture fx = fixture(name);
    QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd fm(qs.raw_dim()), fp(qs.raw_dim());
      for (int i = 0; i < qs.raw_dim(); ++i) {
        fm(i) = u(rng);
        fp(i) = u(rng);
      }
      EdgeFunction f = qs.construct_preimage(fm, fp);
      CHECK(check_domain(f, fx.field).in_domain);
      Eigen::VectorXd gm = qs.apply_G(Side::minus, f);
      Eigen::VectorXd gp = qs.apply_G(Side::plus, f);
      Eigen::VectorXd want_m = qs.project(Side::minus, fm);
      Eigen::VectorXd want_p = qs.project(Side::plus, fp);
      CHECK((gm - want_m).norm() <= 1e-9 * std::max(1.0, want_m.norm()));
      CHECK((gp - want_p).norm() <= 1e-9 * std::max(1.0, want_p.norm()));
    }
  }
}

TEST_CASE("interval preimage hits prescribed traces") {
  Fixture in = fixture("interval");
  QuadrupleSpaces qs = QuadrupleSpaces::build(in.field);
  // H- is the l({q1}) block, H+ the l({q0}) block; raw layout [q0, q1]
  Eigen::VectorXd fm = Eigen::VectorXd::Zero(2), fp = Eigen::VectorXd::Zero(2);
  fm(1) = 0.7;   // G- f = f(1) = 0.7
  fp(0) = -0.3;  // G+ f = -f(0) = -0.3
  EdgeFunction f = qs.construct_preimage(fm, fp);
  CHECK(f.value1(0) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(f.value0(0) == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("contraction check") {
  Fixture in = fixture("interval");
  QuadrupleSpaces qs = QuadrupleSpaces::build(in.field);
  CHECK(qs.check_contraction(Eigen::MatrixXd::Zero(1, 1)).contraction);
  Eigen::MatrixXd t(1, 1);
  t << 1.5;
  CHECK_FALSE(qs.check_contraction(t).contraction);
  t << 1.0;
  CHECK(qs.check_contraction(t).contraction);

  // boundary case: Gram-weighted norm exactly 1 on the star tree
  Fixture tree = fixture("star-tree");
  QuadrupleSpaces qt = QuadrupleSpaces::build(tree.field);
  Contraction th = theta_tree_periodic(qt);
  auto chk = qt.check_contraction(th.theta);
  CHECK(chk.contraction);
  CHECK(chk.sigma_max == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_WITH_AS(qt.check_contraction(Eigen::MatrixXd::Zero(1, 1)),
                       doctest::Contains("DIMENSION_MISMATCH"), Error);
}

TEST_CASE("well-posedness count: interior constraints plus dim H+ equals |E|") {
  for (const auto& name : kSweepFixtures) {
    Fixture fx = fixture(name);
    QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
    CHECK(qs.dim_hminus() == qs.dim_hplus());
    CHECK(fx.graph->interior_count() + qs.dim_hplus() == fx.graph->edge_count());
  }
}

TEST_CASE("desk-scale quadruple on the level-3 gasket") {
  Fixture fx = fixture("sg3");
  QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
  CHECK(fx.graph->interior_count() + qs.dim_hplus() == fx.graph->edge_count());
  std::mt19937_64 rng(131);
  EdgeFunction f1 = random_domain_element(fx, rng);
  EdgeFunction f2 = random_domain_element(fx, rng);
  CHECK(qs.identity_check(f1, f2) <= 1e-9);
}

TEST_CASE("quadruple on the mixed-conductance theta graph") {
  MetricGraph g = MetricGraph::build(
      {"a", "b"},
      {{"e1", "a", "b", 1.0}, {"e2", "a", "b", 2.0}, {"e3", "a", "b", 0.5}},
      {}, {{"b", {{"e1", 1.0}, {"e2", 1.0}, {"e3", -6.0}}}});
  GraphPtr gp = make_graph(std::move(g));
  VelocityField b = field_from_document(gp, "b");
  QuadrupleSpaces qs = QuadrupleSpaces::build(b);
  CHECK(qs.solenoidal());
  CHECK(gp->interior_count() + qs.dim_hplus() == gp->edge_count());
  std::mt19937_64 rng(223);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    EdgeFunction f1 = random_domain_element(b, 400 + 2 * trial);
    EdgeFunction f2 = random_domain_element(b, 401 + 2 * trial);
    CHECK(qs.identity_check(f1, f2) <= 1e-9);
    Eigen::VectorXd fm(qs.raw_dim()), fp(qs.raw_dim());
    for (int i = 0; i < qs.raw_dim(); ++i) {
      fm(i) = u(rng);
      fp(i) = u(rng);
    }
    EdgeFunction f = qs.construct_preimage(fm, fp);
    CHECK((qs.apply_G(Side::minus, f) - qs.project(Side::minus, fm)).norm() <= 1e-9);
    CHECK((qs.apply_G(Side::plus, f) - qs.project(Side::plus, fp)).norm() <= 1e-9);
  }
}

TEST_CASE("theta csv round trip") {
  Eigen::MatrixXd t(2, 3);
  t << 1, 2, 3, 4, 5, 6.5;
  Eigen::MatrixXd back = theta_from_csv(theta_to_csv(t));
  CHECK((back - t).norm() == 0.0);
}
