#include "mgt/acceptance.hpp"

#include <cmath>
#include <random>

#include "mgt/fixtures.hpp"
#include "mgt/report.hpp"
#include "mgt/scattering.hpp"
#include "mgt/sierpinski.hpp"

namespace mgt::acceptance {

namespace {

struct Check {
  bool pass = true;
  double worst = 0.0;
  void max(double value, double tolerance) {
    worst = std::max(worst, value);
    pass = pass && value <= tolerance;
  }
};

std::string fmt(double x) { return report::num(x); }

double smooth_bump(double x, double lo, double hi) {
  if (x <= lo || x >= hi) return 0.0;
  double y = 2.0 * (x - lo) / (hi - lo) - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

EdgeFunction sampled_profile(const GraphPtr& g, int edge, int n, const std::function<double(double)>& f) {
  std::vector<std::vector<double>> data(g->edge_count(), std::vector<double>(n + 1, 0.0));
  for (int j = 0; j <= n; ++j) data[edge][j] = f(double(j) / n);
  return EdgeFunction::sampled(g, std::move(data));
}

// cylindrical pull-back evaluated on the fixture graph (same ids as the raw
// sg_graph output)
EdgeFunction pullback_on_fixture(const Fixture& fx, const SGLevelGraph& sg, SgCase c,
                                 const std::function<double(double)>& profile, double t, int n) {
  EdgeFunction v = cylindrical_solution(sg, c, profile, t, n);
  std::vector<std::vector<double>> vd(fx.graph->edge_count());
  for (int e = 0; e < fx.graph->edge_count(); ++e)
    vd[e] = v.edge_data(sg.graph->edge_index(fx.graph->edge(e).id));
  return EdgeFunction::sampled(fx.graph, std::move(vd));
}

const std::vector<std::string>& sweep_fixtures() {
  static const std::vector<std::string> names = {"interval", "circles", "star-tree", "k1", "sg2",
                                                 "sg2-reduced"};
  return names;
}

CriterionResult criterion_1() {
  CriterionResult r{1, "gasket graph decomposition closed forms", false, ""};
  Fixture k1 = fixture("k1");
  const auto& g = k1.graph;
  auto idx = [&](const std::string& id) { return g->edge_index(id); };

  std::vector<std::vector<double>> phis(3, std::vector<double>(9, 0.0));
  phis[0][idx("q0p2")] = 1.0;
  phis[0][idx("p1p2")] = -0.5;
  phis[0][idx("p1q0")] = 1.0;
  phis[1][idx("p2q1")] = 1.0;
  phis[1][idx("p2p0")] = -0.5;
  phis[1][idx("q1p0")] = 1.0;
  phis[2][idx("p0q2")] = 1.0;
  phis[2][idx("p0p1")] = -0.5;
  phis[2][idx("q2p1")] = 1.0;
  auto coord = [&](const std::vector<double>& vals, int i) {
    double num = 0.0, den = 0.0;
    for (int e = 0; e < 9; ++e) {
      num += k1.field.nu_weights[e] * vals[e] * phis[i][e];
      den += k1.field.nu_weights[e] * phis[i][e] * phis[i][e];
    }
    return num / den;
  };
  auto mean_coord = [&](const std::vector<double>& vals) {
    double num = 0.0, den = 0.0;
    for (int e = 0; e < 9; ++e) {
      num += k1.field.nu_weights[e] * vals[e];
      den += k1.field.nu_weights[e];
    }
    return num / den;
  };

  Check z_empty, z0c, u_slopes, w0c, rearrange, w_empty;
  CycleBasis basis = cycle_basis(g);
  for (int trial = 0; trial < 50; ++trial) {
    EdgeFunction f = random_domain_element(k1.field, 1000 + trial);
    KeyDecomposition kd = key_decompose(f, k1.field, basis);
    z_empty.max(std::abs(mean_coord(kd.z)), 1e-12);

    double z0 = coord(kd.z, 0);
    double z0_ref = (f.value1(idx("q0p2")) - f.value1(idx("p1p2")) + f.value0(idx("p1p2")) -
                     f.value0(idx("p1q0"))) /
                    3.0;
    z0c.max(std::abs(z0 - z0_ref), 1e-10);

    EdgeFunction du = kd.u.edge_function().derivative();
    u_slopes.max(std::abs(du.eval(idx("p1q0"), 0.0) + z0), 1e-10);
    u_slopes.max(std::abs(du.eval(idx("p1q0"), 1.0)), 1e-10);
    u_slopes.max(std::abs(du.eval(idx("q0p2"), 0.0)), 1e-10);
    u_slopes.max(std::abs(du.eval(idx("q0p2"), 1.0) - z0), 1e-10);
    // constant term forced by continuity of u: (1/2) u'_{p1p2}(x) = -z0 x + z0/2
    u_slopes.max(std::abs(0.5 * du.eval(idx("p1p2"), 0.0) - 0.5 * z0), 1e-10);
    u_slopes.max(std::abs(0.5 * du.eval(idx("p1p2"), 1.0) + 0.5 * z0), 1e-10);

    double w0 = coord(kd.w, 0);
    double w0_ref = (f.value0(idx("p1q0")) - f.value0(idx("p1p2")) + f.value1(idx("q0p2")) -
                     f.value1(idx("p1p2"))) /
                    3.0;
    w0c.max(std::abs(w0 - w0_ref), 1e-10);
    rearrange.max(std::abs(3.0 * w0 - 3.0 * z0 - 2.0 * (f.value0(idx("p1q0")) - f.value0(idx("p1p2")))),
                  1e-10);

    double w_emp = mean_coord(kd.w);
    double w_sum = coord(kd.w, 0) + coord(kd.w, 1) + coord(kd.w, 2);
    double corner = (f.value0(idx("q0p2")) - kd.g.vertex_value(g->vertex_index("q0")) +
                     f.value0(idx("q1p0")) - kd.g.vertex_value(g->vertex_index("q1")) +
                     f.value0(idx("q2p1")) - kd.g.vertex_value(g->vertex_index("q2"))) /
                    3.0;
    w_empty.max(std::abs(w_emp - (corner - w_sum / 3.0)), 1e-10);
  }
  r.pass = z_empty.pass && z0c.pass && u_slopes.pass && w0c.pass && rearrange.pass && w_empty.pass;
  r.detail = "worst: z_empty " + fmt(z_empty.worst) + ", z0 " + fmt(z0c.worst) + ", u' " +
             fmt(u_slopes.worst) + ", w0 " + fmt(w0c.worst) + ", 3w-3z " + fmt(rearrange.worst) +
             ", w_empty " + fmt(w_empty.worst);
  return r;
}

CriterionResult criterion_2() {
  CriterionResult r{2, "integration by parts residuals", false, ""};
  Check c;
  for (const auto& name : sweep_fixtures()) {
    Fixture fx = fixture(name);
    for (int trial = 0; trial < 100; ++trial) {
      EdgeFunction f1 = random_domain_element(fx.field, 2000 + 2 * trial);
      EdgeFunction f2 = random_domain_element(fx.field, 2001 + 2 * trial);
      c.max(ibp_check(f1, f2, fx.field), 1e-9);
    }
  }
  r.pass = c.pass;
  r.detail = "worst residual " + fmt(c.worst) + " over " +
             std::to_string(100 * sweep_fixtures().size()) + " pairs";
  return r;
}

CriterionResult criterion_3() {
  CriterionResult r{3, "boundary quadruple identity and gauge invariance", false, ""};
  Check ident, gauge;
  for (const auto& name : sweep_fixtures()) {
    Fixture fx = fixture(name);
    QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
    CycleBasis basis = cycle_basis(fx.graph);
    for (int trial = 0; trial < 100; ++trial) {
      EdgeFunction f1 = random_domain_element(fx.field, 3000 + 2 * trial);
      EdgeFunction f2 = random_domain_element(fx.field, 3001 + 2 * trial);
      ident.max(qs.identity_check(f1, f2), 1e-9);
    }
    for (int trial = 0; trial < 10; ++trial) {
      EdgeFunction f = random_domain_element(fx.field, 3500 + trial);
      KeyDecomposition kd = key_decompose(f, fx.field, basis);
      KeyDecomposition shifted = kd;
      const double c = 0.617 + 0.1 * trial;
      for (auto& gb : shifted.g_b) gb += c;
      for (size_t i = 0; i < fx.graph->boundary().size(); ++i)
        shifted.du_b[i] -= c * normal_part_field(fx.field, fx.graph->boundary()[i]);
      for (int e = 0; e < fx.graph->edge_count(); ++e)
        shifted.w[e] -= c * qs.cycle_part()[e] / fx.field.b[e];
      for (Side s : {Side::minus, Side::plus}) {
        Eigen::VectorXd a = qs.apply_G_from_decomposition(s, kd);
        Eigen::VectorXd b2 = qs.apply_G_from_decomposition(s, shifted);
        gauge.max((a - b2).norm() / std::max(1.0, a.norm()), 1e-10);
      }
    }
  }
  r.pass = ident.pass && gauge.pass;
  r.detail = "worst identity " + fmt(ident.worst) + ", worst gauge shift " + fmt(gauge.worst);
  return r;
}

CriterionResult criterion_4() {
  CriterionResult r{4, "surjectivity round trip", false, ""};
  Check c;
  std::mt19937_64 rng(4000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& name : sweep_fixtures()) {
    Fixture fx = fixture(name);
    QuadrupleSpaces qs = QuadrupleSpaces::build(fx.field);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd fm(qs.raw_dim()), fp(qs.raw_dim());
      for (int i = 0; i < qs.raw_dim(); ++i) {
        fm(i) = u(rng);
        fp(i) = u(rng);
      }
      EdgeFunction f = qs.construct_preimage(fm, fp);
      Eigen::VectorXd gm = qs.apply_G(Side::minus, f) - qs.project(Side::minus, fm);
      Eigen::VectorXd gp = qs.apply_G(Side::plus, f) - qs.project(Side::plus, fp);
      c.max(gm.norm(), 1e-9);
      c.max(gp.norm(), 1e-9);
    }
  }
  r.pass = c.pass;
  r.detail = "worst round-trip residual " + fmt(c.worst);
  return r;
}

CriterionResult criterion_5() {
  CriterionResult r{5, "interval dynamics (absorbing and periodic)", false, ""};
  Fixture in = fixture("interval");
  QuadrupleSpaces qs = QuadrupleSpaces::build(in.field);
  const int n = 512;
  const double dt = 1e-3;

  Contraction th0 = theta_zero(qs);
  EdgeFunction v0 =
      sampled_profile(in.graph, 0, n, [](double x) { return 0.01 * smooth_bump(x, 0.05, 0.95); });
  Trajectory t0 = evolve_cn(qs, th0, v0, dt, 1.0 + 5 * dt, {});
  double sup = t0.last().max_abs_value();

  Contraction thp = theta_scalar(qs, -1.0);
  EdgeFunction w0 = sampled_profile(in.graph, 0, n, [](double x) { return smooth_bump(x, 0.02, 0.98); });
  Trajectory t1 = evolve_cn(qs, thp, w0, dt, 1.0, {});
  EdgeFunction diff = t1.last() - w0;
  double l2 = l2nu_norm(diff, in.field);

  r.pass = sup <= 1e-6 && l2 <= 1e-4;
  r.detail = "absorbing sup " + fmt(sup) + " (tol 1e-6), periodic L2 error " + fmt(l2) + " (tol 1e-4)";
  return r;
}

CriterionResult criterion_6() {
  CriterionResult r{6, "two-circle dynamics (period, track switch, CN agreement)", false, ""};
  Fixture c = fixture("circles-equal");
  QuadrupleSpaces qs = QuadrupleSpaces::build(c.field);
  const int n = 512;
  EdgeFunction v0 = sampled_profile(c.graph, 0, n, [](double x) { return smooth_bump(x, 0.25, 0.75); });

  Trajectory per = evolve_scattering(c.field, rule_circles(c.field, 1.0), v0, 1.0 / n, 1.0, {});
  double l1 = 0.0;
  for (int e = 0; e < 2; ++e)
    for (int j = 0; j < n; ++j) l1 += std::abs(per.last().edge_data(e)[j] - v0.edge_data(e)[j]) / n;

  Trajectory sw = evolve_scattering(c.field, rule_circles(c.field, -1.0), v0, 1.0 / n, 1.0, {});
  double m1 = 0.0, m2 = 0.0;
  for (int j = 0; j < n; ++j) {
    m1 += std::abs(sw.last().edge_data(0)[j]);
    m2 += std::abs(sw.last().edge_data(1)[j]);
  }
  double switched = m2 / (m1 + m2);

  Contraction th = theta_scalar(qs, theta_from_theta_bar(1.0, -1.0));
  Trajectory cn = evolve_cn(qs, th, v0, 1e-3, 1.0, {});
  EdgeFunction diff = cn.last() - sw.last();
  double l2 = l2nu_norm(diff, c.field);

  r.pass = l1 <= 2.0 / n && switched >= 0.99 && l2 <= 1e-3;
  r.detail = "period L1 " + fmt(l1) + " (tol " + fmt(2.0 / n) + "), switched fraction " + fmt(switched) +
             ", CN vs scattering L2 " + fmt(l2) + " (tol 1e-3)";
  return r;
}

CriterionResult criterion_7() {
  CriterionResult r{7, "conservation (unitary norm drift, tree mass balance)", false, ""};
  Fixture k1 = fixture("k1");
  QuadrupleSpaces qk = QuadrupleSpaces::build(k1.field);
  Contraction id = theta_identity(qk);
  const int n = 256;
  std::vector<std::vector<double>> data(9, std::vector<double>(n + 1, 0.0));
  for (int j = 0; j <= n; ++j) {
    data[0][j] = smooth_bump(double(j) / n, 0.1, 0.9);
    data[4][j] = 0.3 * smooth_bump(double(j) / n, 0.2, 0.6);
  }
  EdgeFunction v0 = EdgeFunction::sampled(k1.graph, data);
  Trajectory traj = evolve_cn(qk, id, v0, 1e-3, 1.0, {});
  double drift = 0.0;
  for (size_t k = 1; k < traj.norm.size(); ++k)
    drift = std::max(drift, std::abs(traj.norm[k] - traj.norm[k - 1]));

  Fixture tree = fixture("star-tree");
  QuadrupleSpaces qt = QuadrupleSpaces::build(tree.field);
  Contraction per = theta_tree_periodic(qt);
  EdgeFunction w0 = sampled_profile(tree.graph, 0, n, [](double x) { return smooth_bump(x, 0.2, 0.8); });
  Trajectory tt = evolve_cn(qt, per, w0, 2e-3, 2.0, {});
  double mb = mass_balance_check(tt);

  r.pass = drift <= 1e-12 && mb <= 1e-8;
  r.detail = "norm drift per step " + fmt(drift) + " (tol 1e-12) over " + std::to_string(traj.steps()) +
             " steps, tree mass balance " + fmt(mb) + " (tol 1e-8)";
  return r;
}

CriterionResult criterion_8() {
  CriterionResult r{8, "kernel elements: stationarity and invariance", false, ""};
  Fixture k1 = fixture("k1");
  QuadrupleSpaces qk = QuadrupleSpaces::build(k1.field);
  Contraction id = theta_identity(qk);
  auto idx = [&](const std::string& id_) { return k1.graph->edge_index(id_); };
  std::vector<double> phi0(9, 0.0);
  phi0[idx("q0p2")] = 1.0;
  phi0[idx("p1p2")] = -0.5;
  phi0[idx("p1q0")] = 1.0;
  const int n = 128;
  EdgeFunction p0 = EdgeFunction::edge_constants(k1.graph, phi0, Rep::sampled, n);
  Trajectory fix = evolve_cn(qk, id, p0, 1e-3, 1.0, {});
  EdgeFunction d = fix.last() - p0;
  double step_drift = l2nu_norm(d, k1.field) / fix.steps();

  std::vector<std::vector<double>> data(9, std::vector<double>(n + 1, 0.0));
  for (int j = 0; j <= n; ++j) data[2][j] = smooth_bump(double(j) / n, 0.2, 0.8);
  EdgeFunction bump_k1 = EdgeFunction::sampled(k1.graph, data);
  double inv_i = kernel_invariance_check(qk, id, bump_k1, 2e-3, 0.5);

  auto sine = [](double y) { return std::sin(2.0 * M_PI * y); };

  Fixture sgn = fixture("sg2-reduced");
  QuadrupleSpaces qn = QuadrupleSpaces::build(sgn.field);
  Contraction thn = theta_sg_normal_periodic(qn);
  SGLevelGraph sg2r = sg_graph(2, true);
  EdgeFunction vn = pullback_on_fixture(sgn, sg2r, SgCase::normal_reduced, sine, 0.0, 64);
  double inv_ii = kernel_invariance_check(qn, thn, vn, 5e-3, 0.25);

  Fixture sgd = fixture("sg2");
  QuadrupleSpaces qd = QuadrupleSpaces::build(sgd.field);
  Contraction thd = theta_sg_degenerate_periodic(qd);
  SGLevelGraph sg2 = sg_graph(2, false);
  EdgeFunction vd = pullback_on_fixture(sgd, sg2, SgCase::degenerate, sine, 0.0, 64);
  double inv_iii = kernel_invariance_check(qd, thd, vd, 5e-3, 0.25);

  double inv = std::max({inv_i, inv_ii, inv_iii});
  r.pass = step_drift <= 1e-12 && inv <= 1e-8;
  r.detail = "fixed-point drift per step " + fmt(step_drift) + " (tol 1e-12), kernel invariance " +
             fmt(inv) + " (tol 1e-8)";
  return r;
}

CriterionResult criterion_9() {
  CriterionResult r{9, "gasket normal derivatives across levels", false, ""};
  Check c;
  for (int m = 1; m <= 5; ++m) {
    SGLevelGraph sg = sg_graph(m);
    ContinuousFunction ha = sg_harmonic(sg, 0.0, 1.0, 1.0);
    c.max(std::abs(normal_derivative(ha, sg.corners[0]) + 2.0), 1e-10);
    c.max(std::abs(normal_derivative(ha, sg.corners[1]) - 1.0), 1e-10);
    c.max(std::abs(normal_derivative(ha, sg.corners[2]) - 1.0), 1e-10);
    ContinuousFunction hb = sg_harmonic(sg, 0.0, -1.0 / 6.0, 1.0 / 6.0);
    c.max(std::abs(normal_derivative(hb, sg.corners[0])), 1e-10);
    c.max(std::abs(normal_derivative(hb, sg.corners[1]) + 0.5), 1e-10);
    c.max(std::abs(normal_derivative(hb, sg.corners[2]) - 0.5), 1e-10);
  }
  r.pass = c.pass;
  r.detail = "worst defect " + fmt(c.worst) + " for levels 1..5";
  return r;
}

CriterionResult criterion_10() {
  CriterionResult r{10, "cylindrical evolution and graph approximation", false, ""};
  Fixture sgd = fixture("sg2");
  QuadrupleSpaces qs = QuadrupleSpaces::build(sgd.field);
  Contraction th = theta_sg_degenerate_periodic(qs);
  SGLevelGraph sg2 = sg_graph(2, false);
  auto profile = [](double y) { return std::sin(2.0 * M_PI * y); };
  const int n = 128;
  const double t_end = 0.5, dt = 1e-3;

  Trajectory traj = evolve_cn(qs, th, pullback_on_fixture(sgd, sg2, SgCase::degenerate, profile, 0.0, n),
                              dt, t_end, {});
  EdgeFunction diff =
      traj.last() - pullback_on_fixture(sgd, sg2, SgCase::degenerate, profile, t_end, n);
  double l2 = l2nu_norm(diff, sgd.field);

  auto rows = convergence_experiment(profile, 2.0 * M_PI, SgCase::degenerate, {1, 2, 3, 4, 5});
  bool monotone = true, bounded = true;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].sup_error < rows[i - 1].sup_error)) monotone = false;
    if (!(rows[i].sup_error <= rows[i].osc_bound + 1e-12)) bounded = false;
  }
  r.pass = l2 <= 1e-3 && monotone && bounded;
  std::string errs;
  for (const auto& row : rows) errs += fmt(row.sup_error) + " ";
  r.detail = "CN vs pull-back L2 " + fmt(l2) + " (tol 1e-3); sup errors " + errs +
             (monotone ? "strictly decreasing" : "NOT decreasing") +
             (bounded ? ", within the derivative bound" : ", bound violated");
  return r;
}

CriterionResult criterion_11() {
  CriterionResult r{11, "weak-sense non-uniqueness on the glued circles", false, ""};
  Fixture c = fixture("circles-equal");
  const int n = 4096;
  const double T = 2.0;
  EdgeFunction v0 = sampled_profile(c.graph, 0, n, [](double x) { return smooth_bump(x, 0.25, 0.75); });

  EvolveOptions opts;
  {
    std::vector<std::vector<double>> pd(2, std::vector<double>(n + 1));
    for (int j = 0; j <= n; ++j) {
      pd[0][j] = std::sin(2.0 * M_PI * j / n);
      pd[1][j] = 0.0;
    }
    opts.probes.push_back(EdgeFunction::sampled(c.graph, pd));
    std::vector<std::vector<double>> pe(2, std::vector<double>(n + 1));
    for (int j = 0; j <= n; ++j) {
      pe[0][j] = std::cos(2.0 * M_PI * j / n) - 1.0;
      pe[1][j] = std::sin(4.0 * M_PI * j / n);
    }
    opts.probes.push_back(EdgeFunction::sampled(c.graph, pe));
  }
  opts.snapshot_stride = n / 2;  // t = 1 is one period

  auto psi = [T](double t) { return 1.0 - t / T; };
  auto dpsi = [T](double) { return -1.0 / T; };

  Trajectory t_plus = evolve_scattering(c.field, rule_circles(c.field, 1.0), v0, 1.0 / n, T, opts);
  Trajectory t_minus = evolve_scattering(c.field, rule_circles(c.field, -1.0), v0, 1.0 / n, T, opts);
  double worst_weak = 0.0;
  for (int p = 0; p < 2; ++p) {
    worst_weak = std::max(worst_weak, weak_solution_check(t_plus, p, psi, dpsi));
    worst_weak = std::max(worst_weak, weak_solution_check(t_minus, p, psi, dpsi));
  }

  auto at_time = [&](const Trajectory& tr, double t) -> const EdgeFunction* {
    for (const auto& [tt, snap] : tr.snapshots)
      if (std::abs(tt - t) < 1e-12) return &snap;
    return nullptr;
  };
  const EdgeFunction* a = at_time(t_plus, 1.0);
  const EdgeFunction* b = at_time(t_minus, 1.0);
  double sep = 0.0, v0n = l2nu_norm(v0, c.field);
  if (a && b) {
    EdgeFunction d = *a - *b;
    sep = l2nu_norm(d, c.field);
  }

  r.pass = worst_weak <= 1e-6 && sep >= 0.1 * v0n;
  r.detail = "worst weak residual " + fmt(worst_weak) + " (tol 1e-6), snapshot separation " + fmt(sep) +
             " vs 0.1*||v0|| = " + fmt(0.1 * v0n);
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all() {
  return {criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(), criterion_6(),
          criterion_7(), criterion_8(), criterion_9(), criterion_10(), criterion_11()};
}

nlohmann::ordered_json report_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json j;
  bool all = true;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["name"] = r.name;
    row["pass"] = r.pass;
    row["detail"] = r.detail;
    rows.push_back(row);
    all = all && r.pass;
  }
  j["criteria"] = rows;
  j["all_pass"] = all;
  return j;
}

}  // namespace mgt::acceptance
