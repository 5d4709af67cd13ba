#include "mgt/elliptic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mgt/poly.hpp"

namespace mgt {

namespace {

int gauge_root(const MetricGraph& g) {
  int root = 0;
  for (int v = 1; v < g.vertex_count(); ++v)
    if (g.vertex_id(v) < g.vertex_id(root)) root = v;
  return root;
}

// conductance Laplacian, loops excluded (their contribution cancels)
Eigen::MatrixXd conductance_laplacian(const MetricGraph& g) {
  int nv = g.vertex_count();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nv, nv);
  for (const Edge& e : g.edges()) {
    if (e.tail == e.head) continue;
    L(e.tail, e.tail) += e.conductance;
    L(e.head, e.head) += e.conductance;
    L(e.tail, e.head) -= e.conductance;
    L(e.head, e.tail) -= e.conductance;
  }
  return L;
}

}  // namespace

ContinuousFunction harmonic_extend(GraphPtr g, const std::vector<double>& values_on_B) {
  if (g->boundary().empty()) fail(errc::empty_boundary, "harmonic extension needs a nonempty boundary");
  if (values_on_B.size() != g->boundary().size()) fail(errc::dimension_mismatch, "boundary value count");
  int nv = g->vertex_count();
  Eigen::MatrixXd L = conductance_laplacian(*g);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  for (size_t i = 0; i < g->boundary().size(); ++i) {
    int q = g->boundary()[i];
    L.row(q).setZero();
    L(q, q) = 1.0;
    rhs(q) = values_on_B[i];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
  Eigen::VectorXd u = lu.solve(rhs);
  return ContinuousFunction::interpolate(g, std::vector<double>(u.data(), u.data() + nv));
}

ContinuousFunction harmonic_extend(GraphPtr g, const std::map<std::string, double>& boundary_values) {
  std::vector<double> vals;
  for (int q : g->boundary()) {
    auto it = boundary_values.find(g->vertex_id(q));
    if (it == boundary_values.end())
      fail(errc::bad_document, "missing boundary value for '" + g->vertex_id(q) + "'");
    vals.push_back(it->second);
  }
  return harmonic_extend(std::move(g), vals);
}

ContinuousFunction solve_neumann_constants(const VelocityField& b, const std::vector<double>& z,
                                           const std::vector<double>& eta_on_B) {
  const auto& g = b.graph;
  int nv = g->vertex_count();
  if (static_cast<int>(z.size()) != g->edge_count()) fail(errc::dimension_mismatch, "rhs constant count");
  if (eta_on_B.size() != g->boundary().size()) fail(errc::dimension_mismatch, "Neumann data count");

  // compatibility: integral of z against nu_b equals the total Neumann flux
  double mass = 0.0;
  for (int e = 0; e < g->edge_count(); ++e) mass += b.nu_weights[e] * z[e];
  double flux = 0.0;
  for (double v : eta_on_B) flux += v;
  if (std::abs(mass - flux) > tol::compat * std::max(1.0, std::abs(mass) + std::abs(flux)))
    fail(errc::incompatible_data,
         "int z dnu_b = " + std::to_string(mass) + " but eta(1) = " + std::to_string(flux));

  // vertex flux F(p) = (L u)(p) + d(p) with loads d from the edge curvatures
  Eigen::MatrixXd L = conductance_laplacian(*g);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  for (int e = 0; e < g->edge_count(); ++e) {
    double load = 0.5 * g->edge(e).conductance * b.b[e] * b.b[e] * z[e];
    rhs(g->edge(e).head) -= load;
    rhs(g->edge(e).tail) -= load;
  }
  for (size_t i = 0; i < g->boundary().size(); ++i) rhs(g->boundary()[i]) += eta_on_B[i];

  // remove the constant mode by pinning the gauge root
  int root = gauge_root(*g);
  L.row(root).setZero();
  L(root, root) = 1.0;
  rhs(root) = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
  Eigen::VectorXd u = lu.solve(rhs);

  std::vector<std::vector<double>> data(g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e) {
    double curv = b.b[e] * b.b[e] * z[e];
    double slope = u(g->edge(e).head) - u(g->edge(e).tail) - 0.5 * curv;
    data[e] = {u(g->edge(e).tail), slope, 0.5 * curv};
  }
  std::vector<double> vv(u.data(), u.data() + nv);
  return ContinuousFunction::attach(EdgeFunction::poly(g, std::move(data)), std::move(vv));
}

ContinuousFunction solve_neumann(const NeumannProblem& problem) {
  const auto& g = problem.field.graph;
  if (problem.z.graph().get() != g.get()) fail(errc::graph_mismatch, "rhs lives on a different graph");
  if (!problem.z.is_edge_constant(0.0))
    fail(errc::unsupported_rhs, "Neumann right-hand sides must be edge-wise constant");
  std::vector<double> eta;
  for (int q : g->boundary()) {
    auto it = problem.eta.find(g->vertex_id(q));
    eta.push_back(it == problem.eta.end() ? 0.0 : it->second);
  }
  return solve_neumann_constants(problem.field, problem.z.edge_constant_values(), eta);
}

double normal_derivative(const ContinuousFunction& u, int q) {
  const auto& g = u.graph();
  g->require_boundary(q);
  EdgeFunction du = u.edge_function().derivative();
  double s = 0.0;
  for (int e : g->edges_in(q)) s += g->edge(e).conductance * du.value1(e);
  for (int e : g->edges_out(q)) s -= g->edge(e).conductance * du.value0(e);
  return s;
}

double kirchhoff_slope_residual(const ContinuousFunction& u, int v) {
  const auto& g = u.graph();
  EdgeFunction du = u.edge_function().derivative();
  double s = 0.0;
  for (int e : g->edges_in(v)) s += g->edge(e).conductance * du.value1(e);
  for (int e : g->edges_out(v)) s -= g->edge(e).conductance * du.value0(e);
  return s;
}

}  // namespace mgt
