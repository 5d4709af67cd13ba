#include "mgt/scattering.hpp"

#include <cmath>

#include "evolve_detail.hpp"

namespace mgt {

void ScatteringRule::require_covering(const MetricGraph& g) const {
  if (entry.size() != static_cast<size_t>(g.edge_count()))
    fail(errc::dimension_mismatch, "rule must have one entry row per edge");
  for (int e = 0; e < g.edge_count(); ++e)
    if (!entry[e].covered) {
      const Edge& ed = g.edge(e);
      fail(errc::uncovered_vertex, "no rule feeds edge '" + ed.id + "' at vertex '" +
                                       g.vertex_id(ed.tail) + "'/'" + g.vertex_id(ed.head) + "'");
    }
}

namespace {

int entry_vertex(const MetricGraph& g, const VelocityField& b, int e) {
  return b.b[e] > 0 ? g.edge(e).tail : g.edge(e).head;
}
int exit_vertex(const MetricGraph& g, const VelocityField& b, int e) {
  return b.b[e] > 0 ? g.edge(e).head : g.edge(e).tail;
}

}  // namespace

ScatteringRule rule_interval(const VelocityField& b, double theta) {
  if (b.graph->edge_count() != 1) fail(errc::not_in_catalog, "interval rule needs a single edge");
  ScatteringRule r;
  r.tag = "interval-theta";
  r.entry.resize(1);
  r.entry[0].covered = true;
  if (theta != 0.0) r.entry[0].terms.emplace_back(0, -theta);
  return r;
}

ScatteringRule rule_circles(const VelocityField& b, double theta_bar) {
  const auto& g = b.graph;
  if (g->edge_count() != 2 || g->vertex_count() != 1)
    fail(errc::not_in_catalog, "circle rule needs two loops at one point");
  if (std::abs(b.b[0] - b.b[1]) > 1e-14 * std::abs(b.b[0]))
    fail(errc::not_in_catalog, "circle rule needs equal coefficients");
  ScatteringRule r;
  r.tag = "circles-theta-bar";
  r.entry.resize(2);
  for (int e = 0; e < 2; ++e) {
    r.entry[e].covered = true;
    r.entry[e].terms.emplace_back(e, 0.5 * (1.0 + theta_bar));
    r.entry[e].terms.emplace_back(1 - e, 0.5 * (1.0 - theta_bar));
  }
  return r;
}

ScatteringRule rule_flow_continuity(const VelocityField& b, const std::vector<std::pair<int, int>>& links,
                                    const std::string& tag) {
  const auto& g = b.graph;
  ScatteringRule r;
  r.tag = tag;
  r.entry.resize(g->edge_count());

  std::vector<std::vector<int>> entries(g->vertex_count()), exits(g->vertex_count());
  for (int e = 0; e < g->edge_count(); ++e) {
    entries[entry_vertex(*g, b, e)].push_back(e);
    exits[exit_vertex(*g, b, e)].push_back(e);
  }
  // periodic links: exits of the source vertex also feed the target's entries
  std::vector<std::vector<int>> extra(g->vertex_count());
  for (auto [from, to] : links)
    for (int e : exits[from]) extra[to].push_back(e);

  for (int v = 0; v < g->vertex_count(); ++v) {
    if (entries[v].empty()) continue;
    double w_in = 0.0;
    for (int e : entries[v]) w_in += g->edge(e).conductance * std::abs(b.b[e]);
    std::vector<std::pair<int, double>> terms;
    for (int e : exits[v]) terms.emplace_back(e, g->edge(e).conductance * std::abs(b.b[e]) / w_in);
    for (int e : extra[v]) terms.emplace_back(e, g->edge(e).conductance * std::abs(b.b[e]) / w_in);
    for (int e : entries[v]) {
      r.entry[e].terms = terms;
      r.entry[e].covered = true;
    }
  }
  // edges whose entry vertex has no feeding rule receive zero inflow
  for (auto& row : r.entry) row.covered = true;
  return r;
}

ScatteringRule rule_k1_identity(const VelocityField& b) {
  // Theta = id keeps every triangle circulation coordinate at zero. Around
  // the corner cell through q_i that couples the outgoing jump at one
  // midpoint to the incoming jump at the next midpoint along the flow:
  //   out_outer - out_inner = in_outer(next) - in_inner(next),
  // on top of the flux balance at the midpoint itself. Solving the two
  // equations gives the affine-free local rule below; kernel elements
  // (the phi_i) are exact fixed points of it.
  const auto& g = b.graph;
  ScatteringRule r;
  r.tag = "k1-identity";
  r.entry.resize(g->edge_count());

  struct Mid {
    const char* out_outer;   // outgoing outer edge at this midpoint
    const char* out_inner;   // outgoing inner edge
    const char* in_outer;    // arriving outer edge (weight 1)
    const char* in_inner;    // arriving inner edge (weight 2)
    const char* jump_outer;  // arrivals at the coupled midpoint of the cell
    const char* jump_inner;
  };
  static const Mid mids[] = {
      {"p1q0", "p1p2", "q2p1", "p0p1", "q0p2", "p1p2"},  // p1, cell through q0, jump read at p2
      {"p2q1", "p2p0", "q0p2", "p1p2", "q1p0", "p2p0"},  // p2, cell through q1, jump read at p0
      {"p0q2", "p0p1", "q1p0", "p2p0", "q2p1", "p0p1"},  // p0, cell through q2, jump read at p1
  };
  for (const auto& m : mids) {
    int oo = g->edge_index(m.out_outer), oi = g->edge_index(m.out_inner);
    int io = g->edge_index(m.in_outer), ii = g->edge_index(m.in_inner);
    int jo = g->edge_index(m.jump_outer), ji = g->edge_index(m.jump_inner);
    // out_outer = (in + 2 J)/3, out_inner = (in - J)/3 with
    // in = in_outer + 2 in_inner and J = jump_outer - jump_inner
    r.entry[oo].terms = {{io, 1.0 / 3.0}, {ii, 2.0 / 3.0}, {jo, 2.0 / 3.0}, {ji, -2.0 / 3.0}};
    r.entry[oo].covered = true;
    r.entry[oi].terms = {{io, 1.0 / 3.0}, {ii, 2.0 / 3.0}, {jo, -1.0 / 3.0}, {ji, 1.0 / 3.0}};
    r.entry[oi].covered = true;
  }
  // corner vertices pass values straight through
  static const std::pair<const char*, const char*> corners[] = {
      {"q0p2", "p1q0"}, {"q1p0", "p2q1"}, {"q2p1", "p0q2"}};
  for (auto [entry, exit] : corners) {
    int e = g->edge_index(entry);
    r.entry[e].terms = {{g->edge_index(exit), 1.0}};
    r.entry[e].covered = true;
  }
  return r;
}

namespace {

struct Puller {
  const MetricGraph& g;
  const VelocityField& b;
  const ScatteringRule& rule;
  const std::vector<std::vector<double>>& old;
  int n;

  double interp(int e, double x) const {
    double t = x * n;
    int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
    double s = t - k;
    return old[e][k] * (1.0 - s) + old[e][k + 1] * s;
  }

  double pull(int e, double x, double tau, int depth) const {
    if (depth > 512) fail(errc::singular_system, "characteristic tracing recursion limit exceeded");
    double be = b.b[e];
    double y = x - tau / be;
    if (y >= 0.0 && y <= 1.0) return interp(e, y);
    // the characteristic crosses the entry slot of this edge
    double tau_inside = be > 0 ? x * be : (1.0 - x) * (-be);
    double rest = tau - tau_inside;
    const auto& row = rule.entry[e];
    double v = row.offset;
    for (auto [fe, coeff] : row.terms) v += coeff * pull(fe, b.b[fe] > 0 ? 1.0 : 0.0, rest, depth + 1);
    return v;
  }
};

}  // namespace

Trajectory evolve_scattering(const VelocityField& b, const ScatteringRule& rule, const EdgeFunction& v0,
                             double dt, double t_end, const EvolveOptions& opts) {
  const auto& g = b.graph;
  if (!b.minimal_energy_dominant) fail(errc::field_invalid, "scattering advection needs b_e != 0");
  rule.require_covering(*g);
  if (!(dt > 0.0) || !(t_end >= 0.0)) fail(errc::usage, "need dt > 0 and t_end >= 0");
  EdgeFunction cur = v0.rep() == Rep::sampled ? v0 : v0.to_sampled(kDefaultSamples);
  const int n = cur.sample_cells();
  int steps = static_cast<int>(std::llround(t_end / dt));
  if (steps < 0 || steps > opts.max_steps) fail(errc::usage, "step count out of range");

  std::vector<std::vector<double>> state(g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e) state[e] = cur.edge_data(e);

  Trajectory traj;
  traj.graph = g;
  traj.probe_value.resize(opts.probes.size());
  traj.probe_flux.resize(opts.probes.size());
  detail::DiagTools tools = detail::DiagTools::build(b, n, opts.probes);

  auto snapshot = [&](double t) { traj.snapshots.emplace_back(t, EdgeFunction::sampled(g, state)); };
  tools.record(traj, 0.0, state);
  snapshot(0.0);

  std::vector<std::vector<double>> next(g->edge_count(), std::vector<double>(n + 1));
  for (int k = 1; k <= steps; ++k) {
    Puller p{*g, b, rule, state, n};
    for (int e = 0; e < g->edge_count(); ++e)
      for (int j = 0; j <= n; ++j) next[e][j] = p.pull(e, double(j) / n, dt, 0);
    state.swap(next);
    double t = k * dt;
    tools.record(traj, t, state);
    if ((opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0 && k != steps) || k == steps) snapshot(t);
  }
  return traj;
}

}  // namespace mgt
