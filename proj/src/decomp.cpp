#include "mgt/decomp.hpp"

#include <cmath>
#include <random>

#include "mgt/poly.hpp"
#include "mgt/report.hpp"

namespace mgt {

DomainCheck check_domain(const EdgeFunction& f, const VelocityField& b) {
  if (f.graph().get() != b.graph.get()) fail(errc::graph_mismatch, "function/field graph mismatch");
  if (!b.minimal_energy_dominant || !b.divergence_free_wrt_B)
    fail(errc::field_invalid, "domain test needs a minimal energy-dominant, divergence-free field");
  const auto& g = f.graph();
  DomainCheck out;
  out.vertex_residuals.assign(g->vertex_count(), 0.0);
  double scale = 1.0;
  for (int e = 0; e < g->edge_count(); ++e) {
    scale = std::max(scale, std::abs(g->edge(e).conductance * b.b[e] * f.value0(e)));
    scale = std::max(scale, std::abs(g->edge(e).conductance * b.b[e] * f.value1(e)));
  }
  out.max_residual = 0.0;
  for (int v = 0; v < g->vertex_count(); ++v) {
    if (g->is_boundary(v)) continue;
    double r = 0.0;
    for (int e : g->edges_in(v)) r += g->edge(e).conductance * b.b[e] * f.value1(e);
    for (int e : g->edges_out(v)) r -= g->edge(e).conductance * b.b[e] * f.value0(e);
    out.vertex_residuals[v] = r;
    out.max_residual = std::max(out.max_residual, std::abs(r));
  }
  out.in_domain = out.max_residual <= tol::domain * scale;
  return out;
}

EdgeFunction apply_dbot_unchecked(const EdgeFunction& f, const VelocityField& b) {
  return star_inv(b, f.derivative());
}

EdgeFunction apply_dbot(const EdgeFunction& f, const VelocityField& b) {
  DomainCheck dc = check_domain(f, b);
  if (!dc.in_domain)
    fail(errc::not_in_domain, "weighted Kirchhoff residual " + std::to_string(dc.max_residual));
  return apply_dbot_unchecked(f, b);
}

EdgeFunction KeyDecomposition::reconstruct(const VelocityField& b) const {
  EdgeFunction out = g.edge_function();
  EdgeFunction du = star_inv(b, u.edge_function().derivative());
  out += du;
  out += EdgeFunction::edge_constants(g.graph(), w, out.rep(), out.rep() == Rep::sampled ? out.sample_cells() : 0);
  return out;
}

KeyDecomposition key_decompose(const EdgeFunction& f, const VelocityField& b) {
  return key_decompose(f, b, cycle_basis(f.graph()));
}

KeyDecomposition key_decompose(const EdgeFunction& f, const VelocityField& b, const CycleBasis& basis) {
  DomainCheck dc = check_domain(f, b);
  if (!dc.in_domain)
    fail(errc::not_in_domain, "weighted Kirchhoff residual " + std::to_string(dc.max_residual));
  const auto& g = f.graph();

  // dbot f = star^{-1} dg + z through the Hodge split of the 1-form (f_e')
  HodgeDecomposition hd = hodge_decompose(f.derivative(), basis);
  std::vector<double> z(g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e) z[e] = hd.cycle[e] / b.b[e];

  // Neumann data (du)_B = n_B(f b) - g n_B b
  std::vector<double> eta, nfb, gb;
  for (int q : g->boundary()) {
    double n = normal_part_fb(f, b, q);
    double gq = hd.g.vertex_value(q);
    nfb.push_back(n);
    gb.push_back(gq);
    eta.push_back(n - gq * normal_part_field(b, q));
  }
  ContinuousFunction u = solve_neumann_constants(b, z, eta);

  std::vector<double> dub;
  for (int q : g->boundary()) dub.push_back(normal_derivative(u, q));

  // w = f - g - star^{-1} du is edge-wise constant; evaluate through traces
  std::vector<double> w(g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e) {
    double du_jump = u.vertex_value(g->edge(e).head) - u.vertex_value(g->edge(e).tail);
    w[e] = f.value0(e) - hd.g.vertex_value(g->edge(e).tail) + 0.5 * hd.cycle[e] - du_jump / b.b[e];
  }

  KeyDecomposition kd{std::move(hd.g), std::move(u), std::move(w), std::move(z),
                      std::move(nfb),  std::move(dub), std::move(gb)};
  return kd;
}

double ibp_check(const EdgeFunction& f1, const EdgeFunction& f2, const VelocityField& b) {
  EdgeFunction d1 = apply_dbot(f1, b);
  EdgeFunction d2 = apply_dbot(f2, b);
  double lhs = l2nu_inner(d1, f2, b) + l2nu_inner(f1, d2, b);

  CycleBasis basis = cycle_basis(f1.graph());
  KeyDecomposition k1 = key_decompose(f1, b, basis);
  KeyDecomposition k2 = key_decompose(f2, b, basis);
  double rhs = 0.0;
  const auto& g = f1.graph();
  for (size_t i = 0; i < g->boundary().size(); ++i) {
    double nb = normal_part_field(b, g->boundary()[i]);
    rhs += k2.g_b[i] * k1.n_fb[i] + k1.g_b[i] * k2.n_fb[i] - k1.g_b[i] * k2.g_b[i] * nb;
  }
  for (int e = 0; e < g->edge_count(); ++e)
    rhs += b.nu_weights[e] * (k1.w[e] * k2.z[e] + k1.z[e] * k2.w[e]);
  return std::abs(lhs - rhs);
}

nlohmann::ordered_json key_decomposition_to_json(const KeyDecomposition& kd, const VelocityField& b) {
  nlohmann::ordered_json j;
  j["g"] = kd.g.edge_function().to_json();
  j["u"] = kd.u.edge_function().to_json();
  const auto& g = kd.g.graph();
  nlohmann::ordered_json jw, jz;
  for (int e = 0; e < g->edge_count(); ++e) {
    jw[g->edge(e).id] = kd.w[e];
    jz[g->edge(e).id] = kd.z[e];
  }
  j["w"] = jw;
  j["z"] = jz;
  nlohmann::ordered_json jb;
  for (size_t i = 0; i < g->boundary().size(); ++i) {
    nlohmann::ordered_json row;
    row["n_fb"] = kd.n_fb[i];
    row["du_b"] = kd.du_b[i];
    row["g"] = kd.g_b[i];
    row["n_b"] = normal_part_field(b, g->boundary()[i]);
    jb[g->vertex_id(g->boundary()[i])] = row;
  }
  j["boundary"] = jb;
  return j;
}

EdgeFunction random_domain_element(const VelocityField& b, std::uint64_t seed, int degree) {
  const auto& g = b.graph;
  const int ne = g->edge_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  Eigen::MatrixXd C(g->interior_count(), 2 * ne);
  int row = 0;
  for (int v = 0; v < g->vertex_count(); ++v) {
    if (g->is_boundary(v)) continue;
    C.row(row).setZero();
    for (int e : g->edges_in(v)) C(row, 2 * e + 1) += g->edge(e).conductance * b.b[e];
    for (int e : g->edges_out(v)) C(row, 2 * e) -= g->edge(e).conductance * b.b[e];
    ++row;
  }
  Eigen::VectorXd t(2 * ne);
  for (int i = 0; i < 2 * ne; ++i) t(i) = u(rng);
  if (row > 0) t -= C.transpose() * (C * C.transpose()).ldlt().solve(C * t);

  std::vector<std::vector<double>> data(ne);
  for (int e = 0; e < ne; ++e) {
    std::vector<double> c(degree + 1);
    for (double& x : c) x = u(rng);
    double v0 = poly::eval(c, 0.0), v1 = poly::eval(c, 1.0);
    if (c.size() < 2) c.resize(2, 0.0);
    c[0] += t(2 * e) - v0;
    c[1] += (t(2 * e + 1) - v1) - (t(2 * e) - v0);
    data[e] = std::move(c);
  }
  return EdgeFunction::poly(g, std::move(data));
}

Eigen::VectorXd TraceCalculus::traces(const EdgeFunction& f) const {
  Eigen::VectorXd t(2 * graph->edge_count());
  for (int e = 0; e < graph->edge_count(); ++e) {
    t(2 * e) = f.value0(e);
    t(2 * e + 1) = f.value1(e);
  }
  return t;
}

TraceCalculus build_trace_calculus(const VelocityField& b) {
  TraceCalculus tc;
  tc.graph = b.graph;
  tc.b = b;
  tc.cycles = cycle_basis(b.graph);
  const auto& g = tc.graph;
  const int ne = g->edge_count(), nv = g->vertex_count(), nt = 2 * ne;
  const int r = tc.cycles.rank();

  // jumps J[e] = f_e(1) - f_e(0)
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ne, nt);
  for (int e = 0; e < ne; ++e) {
    J(e, 2 * e) = -1.0;
    J(e, 2 * e + 1) = 1.0;
  }

  // cycle coefficients a = Gram^{-1} (C_w J), cycle field V = X a, z = V / b
  tc.V = Eigen::MatrixXd::Zero(ne, nt);
  if (r > 0) {
    Eigen::MatrixXd Cw(r, ne);
    for (int i = 0; i < r; ++i)
      for (int e = 0; e < ne; ++e) Cw(i, e) = g->edge(e).conductance * tc.cycles.cycles[i][e];
    Eigen::MatrixXd A = tc.cycles.gram.ldlt().solve(Cw * J);
    Eigen::MatrixXd X(ne, r);
    for (int e = 0; e < ne; ++e)
      for (int i = 0; i < r; ++i) X(e, i) = tc.cycles.cycles[i][e];
    tc.V = X * A;
  }
  tc.Z = tc.V;
  for (int e = 0; e < ne; ++e) tc.Z.row(e) /= b.b[e];

  // g vertex rows by tree propagation
  tc.Gv = Eigen::MatrixXd::Zero(nv, nt);
  for (int v : tc.cycles.bfs_order) {
    if (v == tc.cycles.root) continue;
    int e = tc.cycles.tree_parent_edge[v];
    int parent = g->edge(e).head == v ? g->edge(e).tail : g->edge(e).head;
    double sgn = g->edge(e).head == v ? 1.0 : -1.0;
    tc.Gv.row(v) = tc.Gv.row(parent) + sgn * (J.row(e) - tc.V.row(e));
  }

  // Neumann rows: pinned conductance Laplacian applied to the flux loads
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nv, nv);
  for (const Edge& e : g->edges()) {
    if (e.tail == e.head) continue;
    L(e.tail, e.tail) += e.conductance;
    L(e.head, e.head) += e.conductance;
    L(e.tail, e.head) -= e.conductance;
    L(e.head, e.tail) -= e.conductance;
  }
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nv, nt);
  for (int e = 0; e < ne; ++e) {
    Eigen::RowVectorXd load = 0.5 * g->edge(e).conductance * b.b[e] * b.b[e] * tc.Z.row(e);
    R.row(g->edge(e).head) -= load;
    R.row(g->edge(e).tail) -= load;
  }
  const auto& bd = g->boundary();
  tc.Nfb = Eigen::MatrixXd::Zero(static_cast<int>(bd.size()), nt);
  for (size_t i = 0; i < bd.size(); ++i) {
    int q = bd[i];
    for (int e : g->edges_in(q)) tc.Nfb(i, 2 * e + 1) += g->edge(e).conductance * b.b[e];
    for (int e : g->edges_out(q)) tc.Nfb(i, 2 * e) -= g->edge(e).conductance * b.b[e];
    double nb = normal_part_field(b, q);
    R.row(q) += tc.Nfb.row(i) - nb * tc.Gv.row(q);
  }
  int root = tc.cycles.root;
  L.row(root).setZero();
  L(root, root) = 1.0;
  R.row(root).setZero();
  tc.Uv = Eigen::PartialPivLU<Eigen::MatrixXd>(L).solve(R);

  // (du)_B of the computed u: slopes s_e = Uv(head)-Uv(tail) -+ b^2 z / 2
  tc.Dub = Eigen::MatrixXd::Zero(static_cast<int>(bd.size()), nt);
  for (size_t i = 0; i < bd.size(); ++i) {
    int q = bd[i];
    for (int e : g->edges_in(q)) {
      double c = g->edge(e).conductance;
      tc.Dub.row(i) += c * (tc.Uv.row(g->edge(e).head) - tc.Uv.row(g->edge(e).tail) +
                            0.5 * b.b[e] * b.b[e] * tc.Z.row(e));
    }
    for (int e : g->edges_out(q)) {
      double c = g->edge(e).conductance;
      tc.Dub.row(i) -= c * (tc.Uv.row(g->edge(e).head) - tc.Uv.row(g->edge(e).tail) -
                            0.5 * b.b[e] * b.b[e] * tc.Z.row(e));
    }
  }

  // w_e = f_e(0) - g(tail) + v_e/2 - (u(head) - u(tail))/b_e
  tc.W = Eigen::MatrixXd::Zero(ne, nt);
  for (int e = 0; e < ne; ++e) {
    tc.W(e, 2 * e) += 1.0;
    tc.W.row(e) -= tc.Gv.row(g->edge(e).tail);
    tc.W.row(e) += 0.5 * tc.V.row(e);
    tc.W.row(e) -= (tc.Uv.row(g->edge(e).head) - tc.Uv.row(g->edge(e).tail)) / b.b[e];
  }

  tc.Kir = Eigen::MatrixXd::Zero(g->interior_count(), nt);
  int row = 0;
  for (int v = 0; v < nv; ++v) {
    if (g->is_boundary(v)) continue;
    for (int e : g->edges_in(v)) tc.Kir(row, 2 * e + 1) += g->edge(e).conductance * b.b[e];
    for (int e : g->edges_out(v)) tc.Kir(row, 2 * e) -= g->edge(e).conductance * b.b[e];
    ++row;
  }
  return tc;
}

}  // namespace mgt
