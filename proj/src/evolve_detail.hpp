#pragma once

#include "mgt/generator.hpp"

namespace mgt::detail {

// Per-step diagnostics over per-edge nodal states. Inner products are the
// exact piecewise-linear ones, so conservation statements are sharp.
struct DiagTools {
  GraphPtr graph;
  VelocityField b;
  int n = 0;
  std::vector<std::vector<double>> probe_vals;   // probes, nodal
  std::vector<std::vector<double>> probe_diffs;  // per probe/edge/cell: phi_{j+1} - phi_j

  static DiagTools build(const VelocityField& b, int n, const std::vector<EdgeFunction>& probes) {
    DiagTools t;
    t.graph = b.graph;
    t.b = b;
    t.n = n;
    for (const auto& p : probes) {
      EdgeFunction ps = p.to_sampled(n);
      std::vector<double> vals, diffs;
      for (int e = 0; e < b.graph->edge_count(); ++e) {
        const auto& d = ps.edge_data(e);
        vals.insert(vals.end(), d.begin(), d.end());
        for (int j = 0; j < n; ++j) diffs.push_back(d[j + 1] - d[j]);
      }
      t.probe_vals.push_back(std::move(vals));
      t.probe_diffs.push_back(std::move(diffs));
    }
    return t;
  }

  double edge_pl_inner(const std::vector<double>& a, const std::vector<double>& c) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      s += 2.0 * a[j] * c[j] + a[j] * c[j + 1] + a[j + 1] * c[j] + 2.0 * a[j + 1] * c[j + 1];
    return s / (6.0 * n);
  }

  void record(Trajectory& traj, double t, const std::vector<std::vector<double>>& state) const {
    const auto& g = graph;
    double nrm2 = 0.0, mass = 0.0;
    for (int e = 0; e < g->edge_count(); ++e) {
      nrm2 += b.nu_weights[e] * edge_pl_inner(state[e], state[e]);
      double m = 0.5 * (state[e].front() + state[e].back());
      for (int j = 1; j < n; ++j) m += state[e][j];
      mass += b.nu_weights[e] * m / n;
    }
    traj.times.push_back(t);
    traj.norm.push_back(std::sqrt(std::max(0.0, nrm2)));
    traj.mass.push_back(mass);
    std::vector<double> flux;
    for (int q : g->boundary()) {
      double s = 0.0;
      for (int e : g->edges_in(q)) s += g->edge(e).conductance * b.b[e] * state[e].back();
      for (int e : g->edges_out(q)) s -= g->edge(e).conductance * b.b[e] * state[e].front();
      flux.push_back(s);
    }
    traj.boundary_flux.push_back(std::move(flux));
    for (size_t p = 0; p < probe_vals.size(); ++p) {
      double a = 0.0, m = 0.0;
      size_t off = 0, coff = 0;
      for (int e = 0; e < g->edge_count(); ++e) {
        const auto& st = state[e];
        double ae = 0.0;
        for (int j = 0; j < n; ++j) {
          double pv0 = probe_vals[p][off + j], pv1 = probe_vals[p][off + j + 1];
          ae += 2.0 * st[j] * pv0 + st[j] * pv1 + st[j + 1] * pv0 + 2.0 * st[j + 1] * pv1;
          m += g->edge(e).conductance * b.b[e] * 0.5 * (st[j] + st[j + 1]) * probe_diffs[p][coff + j];
        }
        a += b.nu_weights[e] * ae / (6.0 * n);
        off += n + 1;
        coff += n;
      }
      traj.probe_value[p].push_back(a);
      traj.probe_flux[p].push_back(m);
    }
  }
};

}  // namespace mgt::detail
