#include "mgt/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mgt/poly.hpp"
#include "mgt/report.hpp"

namespace mgt {

double VelocityField::total_mass() const {
  double s = 0.0;
  for (double w : nu_weights) s += w;
  return s;
}

void VelocityField::require_valid() const {
  if (!minimal_energy_dominant) fail(errc::field_invalid, "field is not minimal energy-dominant");
  if (!divergence_free_wrt_B) fail(errc::field_invalid, "field is not divergence free with respect to B");
}

VelocityField check_field(GraphPtr g, std::vector<double> coefficients) {
  if (static_cast<int>(coefficients.size()) != g->edge_count())
    fail(errc::dimension_mismatch, "field coefficient count");
  VelocityField f;
  f.graph = g;
  f.b = std::move(coefficients);
  double min_abs = std::numeric_limits<double>::infinity();
  for (double be : f.b) {
    if (!std::isfinite(be)) fail(errc::field_invalid, "non-finite field coefficient");
    min_abs = std::min(min_abs, std::abs(be));
  }
  f.minimal_energy_dominant = min_abs > tol::med;
  f.nu_weights.resize(f.b.size());
  for (int e = 0; e < g->edge_count(); ++e) f.nu_weights[e] = g->edge(e).conductance * f.b[e] * f.b[e];

  // conductance-weighted balance per vertex; loops land in both sums
  double max_all = 0.0, max_interior = 0.0;
  for (int v = 0; v < g->vertex_count(); ++v) {
    double r = 0.0;
    for (int e : g->edges_in(v)) r += g->edge(e).conductance * f.b[e];
    for (int e : g->edges_out(v)) r -= g->edge(e).conductance * f.b[e];
    max_all = std::max(max_all, std::abs(r));
    if (!g->is_boundary(v)) max_interior = std::max(max_interior, std::abs(r));
  }
  f.max_kirchhoff_residual = max_interior;
  f.divergence_free_wrt_B = max_interior <= tol::kirchhoff;
  f.solenoidal = max_all <= tol::kirchhoff;
  return f;
}

VelocityField field_from_document(GraphPtr g, const std::string& name) {
  return check_field(g, g->field(name));
}

double l2nu_inner(const EdgeFunction& f1, const EdgeFunction& f2, const VelocityField& b) {
  if (f1.graph().get() != b.graph.get()) fail(errc::graph_mismatch, "function/field graph mismatch");
  return weighted_inner(f1, f2, b.nu_weights);
}

double l2nu_inner_consistent(const EdgeFunction& f1, const EdgeFunction& f2, const VelocityField& b) {
  if (f1.graph().get() != b.graph.get()) fail(errc::graph_mismatch, "function/field graph mismatch");
  return weighted_inner_consistent(f1, f2, b.nu_weights);
}

double l2nu_norm(const EdgeFunction& f, const VelocityField& b) {
  return std::sqrt(std::max(0.0, l2nu_inner_consistent(f, f, b)));
}

CycleBasis cycle_basis(GraphPtr g) {
  CycleBasis basis;
  basis.graph = g;
  int nv = g->vertex_count();

  // BFS from the lexicographically smallest vertex id; neighbors scanned in
  // edge-index order so the tree is reproducible.
  int root = 0;
  for (int v = 1; v < nv; ++v)
    if (g->vertex_id(v) < g->vertex_id(root)) root = v;
  basis.root = root;
  basis.tree_parent_edge.assign(nv, -1);
  std::vector<char> visited(nv, 0);
  std::vector<char> in_tree(g->edge_count(), 0);
  std::queue<int> q;
  q.push(root);
  visited[root] = 1;
  basis.bfs_order.push_back(root);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    std::vector<std::pair<int, int>> nbrs;  // (edge, other endpoint)
    for (int e : g->edges_out(v)) nbrs.emplace_back(e, g->edge(e).head);
    for (int e : g->edges_in(v)) nbrs.emplace_back(e, g->edge(e).tail);
    std::sort(nbrs.begin(), nbrs.end());
    for (auto [e, w] : nbrs) {
      if (visited[w]) continue;
      visited[w] = 1;
      in_tree[e] = 1;
      basis.tree_parent_edge[w] = e;
      basis.bfs_order.push_back(w);
      q.push(w);
    }
  }

  // root-relative signed tree paths: path[v][e] = coefficient of edge e on
  // the tree path root -> v, oriented along the edge direction
  std::vector<std::vector<std::pair<int, double>>> path(nv);
  for (int v : basis.bfs_order) {
    if (v == root) continue;
    int e = basis.tree_parent_edge[v];
    int parent = g->edge(e).head == v ? g->edge(e).tail : g->edge(e).head;
    double sgn = g->edge(e).head == v ? 1.0 : -1.0;
    path[v] = path[parent];
    path[v].emplace_back(e, sgn);
  }

  // Each fundamental circulation carries +-1 along its loop; the kernel of
  // the coderivative consists of such circulations divided edge-wise by the
  // conductance (the conductance-weighted flux c_e v_e is what balances).
  for (int e = 0; e < g->edge_count(); ++e) {
    if (in_tree[e]) continue;
    std::vector<double> chi(g->edge_count(), 0.0);
    chi[e] = 1.0;  // follow the non-tree edge, close back through the tree
    for (auto [te, s] : path[g->edge(e).tail]) chi[te] += s;
    for (auto [te, s] : path[g->edge(e).head]) chi[te] -= s;
    for (int ee = 0; ee < g->edge_count(); ++ee) chi[ee] /= g->edge(ee).conductance;
    basis.cycles.push_back(std::move(chi));
  }

  int r = basis.rank();
  basis.gram.resize(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      double s = 0.0;
      for (int e = 0; e < g->edge_count(); ++e)
        s += g->edge(e).conductance * basis.cycles[i][e] * basis.cycles[j][e];
      basis.gram(i, j) = s;
    }
  return basis;
}

EdgeFunction star_inv(const VelocityField& b, const EdgeFunction& v) {
  if (!b.minimal_energy_dominant) fail(errc::not_energy_dominant, "star_b^{-1} needs |b_e| > 0 on every edge");
  EdgeFunction out = v;
  for (int e = 0; e < v.graph()->edge_count(); ++e)
    for (double& x : out.edge_data(e)) x /= b.b[e];
  return out;
}

HodgeDecomposition hodge_decompose(const EdgeFunction& form, const CycleBasis& basis) {
  const auto& g = form.graph();
  int r = basis.rank();
  std::vector<double> cyc(g->edge_count(), 0.0);
  if (r > 0) {
    Eigen::VectorXd rhs(r);
    for (int i = 0; i < r; ++i) {
      double s = 0.0;
      for (int e = 0; e < g->edge_count(); ++e)
        if (basis.cycles[i][e] != 0.0) s += g->edge(e).conductance * basis.cycles[i][e] * form.mean(e);
      rhs(i) = s;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(basis.gram);
    if (ldlt.info() != Eigen::Success) fail(errc::singular_gram, "cycle Gram factorization failed");
    Eigen::VectorXd a = ldlt.solve(rhs);
    for (int i = 0; i < r; ++i)
      for (int e = 0; e < g->edge_count(); ++e) cyc[e] += a(i) * basis.cycles[i][e];
  }

  // integrate form - cyc along the spanning tree, g(root) = 0
  std::vector<double> vertex_values(g->vertex_count(), 0.0);
  for (int v : basis.bfs_order) {
    if (v == basis.root) continue;
    int e = basis.tree_parent_edge[v];
    int parent = g->edge(e).head == v ? g->edge(e).tail : g->edge(e).head;
    double inc = form.mean(e) - cyc[e];
    vertex_values[v] = g->edge(e).head == v ? vertex_values[parent] + inc : vertex_values[parent] - inc;
  }

  EdgeFunction pot = [&] {
    if (form.rep() == Rep::poly) {
      std::vector<std::vector<double>> data(g->edge_count());
      for (int e = 0; e < g->edge_count(); ++e) {
        auto anti = poly::antiderivative(form.edge_data(e));
        anti[1] -= cyc[e];
        anti[0] = vertex_values[g->edge(e).tail];
        data[e] = std::move(anti);
      }
      return EdgeFunction::poly(g, std::move(data));
    }
    int n = form.sample_cells();
    std::vector<std::vector<double>> data(g->edge_count());
    for (int e = 0; e < g->edge_count(); ++e) {
      const auto& d = form.edge_data(e);
      std::vector<double> acc(n + 1);
      acc[0] = vertex_values[g->edge(e).tail];
      for (int k = 0; k < n; ++k) acc[k + 1] = acc[k] + 0.5 * (d[k] + d[k + 1]) / n - cyc[e] / n;
      data[e] = std::move(acc);
    }
    return EdgeFunction::sampled(g, std::move(data));
  }();

  return {ContinuousFunction::attach(std::move(pot), std::move(vertex_values)), std::move(cyc)};
}

HodgeDecomposition hodge_decompose(const EdgeFunction& form) {
  return hodge_decompose(form, cycle_basis(form.graph()));
}

double normal_part(const EdgeFunction& v, int q) {
  const auto& g = v.graph();
  g->require_boundary(q);
  double s = 0.0;
  for (int e : g->edges_in(q)) s += g->edge(e).conductance * v.value1(e);
  for (int e : g->edges_out(q)) s -= g->edge(e).conductance * v.value0(e);
  return s;
}

double normal_part_fb(const TraceMeanVector& f, const VelocityField& b, int q) {
  const auto& g = b.graph;
  g->require_boundary(q);
  double s = 0.0;
  for (int e : g->edges_in(q)) s += g->edge(e).conductance * b.b[e] * f[e].v1;
  for (int e : g->edges_out(q)) s -= g->edge(e).conductance * b.b[e] * f[e].v0;
  return s;
}

double normal_part_fb(const EdgeFunction& f, const VelocityField& b, int q) {
  return normal_part_fb(trace_mean(f), b, q);
}

double normal_part_field(const VelocityField& b, int q) {
  const auto& g = b.graph;
  g->require_boundary(q);
  double s = 0.0;
  for (int e : g->edges_in(q)) s += g->edge(e).conductance * b.b[e];
  for (int e : g->edges_out(q)) s -= g->edge(e).conductance * b.b[e];
  return s;
}

std::string cycles_to_csv(const CycleBasis& basis) {
  std::vector<std::string> header = {"edge"};
  for (int i = 0; i < basis.rank(); ++i) header.push_back("cycle_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (int e = 0; e < basis.graph->edge_count(); ++e) {
    labels.push_back(basis.graph->edge(e).id);
    std::vector<double> row;
    for (int i = 0; i < basis.rank(); ++i) row.push_back(basis.cycles[i][e]);
    rows.push_back(std::move(row));
  }
  return report::csv(header, rows, labels);
}

}  // namespace mgt
