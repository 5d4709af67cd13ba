#include "mgt/sierpinski.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/report.hpp"

namespace mgt {

namespace {

struct Cell {
  int x, y, s;  // local q1 corner and side length, lattice units
};

void collect_cells(int x, int y, int s, std::vector<Cell>& out) {
  if (s == 1) {
    out.push_back({x, y, 1});
    return;
  }
  int h = s / 2;
  collect_cells(x, y, h, out);          // toward q1
  collect_cells(x + h, y, h, out);      // toward q2
  collect_cells(x, y + h, h, out);      // toward q0
}

std::string vertex_name(int x, int y, int scale) {
  if (x == 0 && y == scale) return "q0";
  if (x == 0 && y == 0) return "q1";
  if (x == scale && y == 0) return "q2";
  return "v" + std::to_string(x) + "_" + std::to_string(y);
}

// midpoint extension over one cell, recursing to unit cells
void extend_values(std::map<std::pair<int, int>, double>& vals, int x, int y, int s, double va, double vb,
                   double vc) {
  vals[{x, y}] = va;
  vals[{x + s, y}] = vb;
  vals[{x, y + s}] = vc;
  if (s == 1) return;
  int h = s / 2;
  double mab = (2 * va + 2 * vb + vc) / 5.0;
  double mbc = (2 * vb + 2 * vc + va) / 5.0;
  double mca = (2 * vc + 2 * va + vb) / 5.0;
  extend_values(vals, x, y, h, va, mab, mca);
  extend_values(vals, x + h, y, h, mab, vb, mbc);
  extend_values(vals, x, y + h, h, mca, mbc, vc);
}

}  // namespace

SGLevelGraph sg_graph(int level, bool reduced) {
  if (level < 0 || level > kMaxSgLevel)
    fail(errc::level_too_large, "supported levels are 0.." + std::to_string(kMaxSgLevel));
  const int scale = 1 << level;
  std::vector<Cell> cells;
  collect_cells(0, 0, scale, cells);

  std::map<std::pair<int, int>, int> vindex;
  std::vector<std::string> vertex_ids;
  std::vector<std::pair<int, int>> coords;
  auto vertex = [&](int x, int y) {
    auto it = vindex.find({x, y});
    if (it != vindex.end()) return it->second;
    int idx = static_cast<int>(vertex_ids.size());
    vindex[{x, y}] = idx;
    vertex_ids.push_back(vertex_name(x, y, scale));
    coords.emplace_back(x, y);
    return idx;
  };

  SGLevelGraph sg;
  sg.level = level;
  sg.reduced = reduced;
  double conductance = std::pow(5.0 / 3.0, level);
  std::vector<std::tuple<std::string, std::string, std::string, double>> edges;
  // the cell holding q0 is (0, scale-1, 1); its bottom edge is the one the
  // reduced graph drops
  auto removed = [&](int x, int y, int x2, int y2) {
    return reduced && level >= 1 && y == scale - 1 && y2 == scale - 1 && x == 0 && x2 == 1;
  };
  std::vector<std::array<int, 3>> cell_edges;
  std::vector<std::array<int, 3>> cell_verts;
  int edge_count = 0;
  for (const Cell& c : cells) {
    int a = vertex(c.x, c.y), b = vertex(c.x + 1, c.y), cc = vertex(c.x, c.y + 1);
    std::array<std::array<int, 2>, 3> seg = {{{a, b}, {b, cc}, {cc, a}}};
    std::array<std::array<int, 4>, 3> lattice = {{{c.x, c.y, c.x + 1, c.y},
                                                  {c.x + 1, c.y, c.x, c.y + 1},
                                                  {c.x, c.y + 1, c.x, c.y}}};
    std::array<int, 3> eidx = {-1, -1, -1};
    for (int k = 0; k < 3; ++k) {
      auto [x1, y1, x2, y2] = std::tuple{lattice[k][0], lattice[k][1], lattice[k][2], lattice[k][3]};
      if (removed(x1, y1, x2, y2)) continue;
      std::string id = "e" + std::to_string(x1) + "_" + std::to_string(y1) + "_" + std::to_string(x2) + "_" +
                       std::to_string(y2);
      edges.emplace_back(id, vertex_ids[seg[k][0]], vertex_ids[seg[k][1]], conductance);
      eidx[k] = edge_count++;
    }
    cell_verts.push_back({a, b, cc});
    cell_edges.push_back(eidx);
  }
  std::vector<std::string> boundary = {"q0", "q1", "q2"};
  MetricGraph g = MetricGraph::build(vertex_ids, edges, boundary);
  sg.graph = make_graph(std::move(g));
  sg.coords = coords;
  sg.corners = {sg.graph->vertex_index("q0"), sg.graph->vertex_index("q1"), sg.graph->vertex_index("q2")};
  sg.cells = cell_verts;
  sg.cell_edges = cell_edges;
  return sg;
}

std::map<std::pair<int, int>, double> sg_harmonic_values(int level, double at_q0, double at_q1, double at_q2) {
  std::map<std::pair<int, int>, double> vals;
  extend_values(vals, 0, 0, 1 << level, at_q1, at_q2, at_q0);
  return vals;
}

ContinuousFunction sg_harmonic(const SGLevelGraph& sg, double at_q0, double at_q1, double at_q2) {
  auto vals = sg_harmonic_values(sg.level, at_q0, at_q1, at_q2);
  std::vector<double> vv(sg.graph->vertex_count());
  for (int v = 0; v < sg.graph->vertex_count(); ++v) vv[v] = vals.at(sg.coords[v]);
  return ContinuousFunction::interpolate(sg.graph, std::move(vv));
}

VelocityField sg_velocity(const SGLevelGraph& sg, const ContinuousFunction& h) {
  std::vector<double> slopes(sg.graph->edge_count());
  for (int e = 0; e < sg.graph->edge_count(); ++e)
    slopes[e] = h.vertex_value(sg.graph->edge(e).head) - h.vertex_value(sg.graph->edge(e).tail);
  return check_field(sg.graph, std::move(slopes));
}

std::vector<double> sg_dzeta(const SGLevelGraph& sg, const std::vector<int>& word) {
  if (static_cast<int>(word.size()) + 1 > sg.level)
    fail(errc::level_insufficient, "dzeta needs level >= |word| + 1");
  int scale = 1 << sg.level;
  int x = 0, y = 0, s = scale;
  for (int letter : word) {
    s /= 2;
    if (letter == 0) {
      y += s;  // toward q0
    } else if (letter == 2) {
      x += s;  // toward q2
    } else if (letter != 1) {
      fail(errc::bad_document, "word letters must be 0, 1 or 2");
    }
  }
  int h = s / 2;
  // child cells toward q0 / q1 / q2 of the addressed cell, with the cyclic
  // boundary data of the three generating harmonics
  struct Child {
    int cx, cy;      // local q1 corner
    int ox, oy;      // corner of the parent cell this child touches
    int mx1, my1;    // midpoint carrying -1/6
    int mx2, my2;    // midpoint carrying +1/6
  };
  // parent corners: Q0 = (x, y+s), Q1 = (x, y), Q2 = (x+s, y); midpoints
  // M01 = (x, y+h), M12 = (x+h, y), M20 = (x+h, y+h)
  std::array<Child, 3> children = {{
      {x, y + h, x, y + s, x, y + h, x + h, y + h},  // i = 0: zero at Q0, -1/6 toward q1
      {x, y, x, y, x + h, y, x, y + h},              // i = 1: zero at Q1, -1/6 toward q2
      {x + h, y, x + s, y, x + h, y + h, x + h, y},  // i = 2: zero at Q2, -1/6 toward q0
  }};

  // the pieces are glued discontinuously at the shared midpoints, so each
  // child keeps its own value table
  std::array<std::map<std::pair<int, int>, double>, 3> vals;
  for (int i = 0; i < 3; ++i) {
    const Child& ch = children[i];
    double va = 0.0, vb = 0.0, vc = 0.0;  // local q1 / q2 / q0 corners of the child cell
    auto assign = [&](int px, int py, double value) {
      if (px == ch.cx && py == ch.cy) va = value;
      if (px == ch.cx + h && py == ch.cy) vb = value;
      if (px == ch.cx && py == ch.cy + h) vc = value;
    };
    assign(ch.ox, ch.oy, 0.0);
    assign(ch.mx1, ch.my1, -1.0 / 6.0);
    assign(ch.mx2, ch.my2, 1.0 / 6.0);
    extend_values(vals[i], ch.cx, ch.cy, h, va, vb, vc);
  }
  auto inside = [&](const Child& ch, int px, int py) {
    return px >= ch.cx && py >= ch.cy && px + py <= ch.cx + ch.cy + h;
  };

  std::vector<double> form(sg.graph->edge_count(), 0.0);
  for (int e = 0; e < sg.graph->edge_count(); ++e) {
    auto [tx, ty] = sg.coords[sg.graph->edge(e).tail];
    auto [hx, hy] = sg.coords[sg.graph->edge(e).head];
    for (int i = 0; i < 3; ++i) {
      if (!inside(children[i], tx, ty) || !inside(children[i], hx, hy)) continue;
      form[e] = vals[i].at({hx, hy}) - vals[i].at({tx, ty});
      break;
    }
  }
  return form;
}

std::array<double, 3> sg_case_data(SgCase c) {
  switch (c) {
    case SgCase::normal_reduced: return {0.0, 1.0, 1.0};
    case SgCase::degenerate: return {0.5, 0.0, 1.0};
  }
  fail(errc::not_in_catalog, "unknown cylindrical case");
}

EdgeFunction cylindrical_solution(const SGLevelGraph& sg, SgCase c, const std::function<double(double)>& profile,
                                  double t, int n) {
  if (std::abs(profile(1.0) - profile(0.0)) > 1e-12)
    fail(errc::profile_not_periodic, "profile must have period 1");
  auto data = sg_case_data(c);
  ContinuousFunction h = sg_harmonic(sg, data[0], data[1], data[2]);
  std::vector<std::vector<double>> out(sg.graph->edge_count());
  for (int e = 0; e < sg.graph->edge_count(); ++e) {
    double a = h.vertex_value(sg.graph->edge(e).tail);
    double bb = h.vertex_value(sg.graph->edge(e).head);
    std::vector<double> v(n + 1);
    for (int j = 0; j <= n; ++j) v[j] = profile(a + (bb - a) * j / n - t);
    out[e] = std::move(v);
  }
  return EdgeFunction::sampled(sg.graph, std::move(out));
}

std::vector<ConvergenceRow> convergence_experiment(const std::function<double(double)>& profile,
                                                   double profile_derivative_sup, SgCase c,
                                                   const std::vector<int>& levels) {
  if (std::abs(profile(1.0) - profile(0.0)) > 1e-12)
    fail(errc::profile_not_periodic, "profile must have period 1");
  auto data = sg_case_data(c);
  std::vector<ConvergenceRow> rows;
  for (int m : levels) {
    const int fine = m + 4;
    auto h_true = sg_harmonic_values(fine, data[0], data[1], data[2]);
    auto h_m = sg_harmonic_values(m, data[0], data[1], data[2]);
    SGLevelGraph sg = sg_graph(m, c == SgCase::normal_reduced);

    // sample points: every level-m edge subdivided at quarters, exact values
    // of h from the level-(m+4) table
    double sup = 0.0;
    const int tgrid = 33;
    for (int e = 0; e < sg.graph->edge_count(); ++e) {
      auto [tx, ty] = sg.coords[sg.graph->edge(e).tail];
      auto [hx, hy] = sg.coords[sg.graph->edge(e).head];
      double ht0 = h_m.at({tx, ty}), ht1 = h_m.at({hx, hy});
      for (int k = 0; k <= 4; ++k) {
        int fx = tx * 16 + (hx - tx) * 4 * k;
        int fy = ty * 16 + (hy - ty) * 4 * k;
        double exact = h_true.at({fx, fy});
        double lin = ht0 + (ht1 - ht0) * k / 4.0;
        for (int j = 0; j < tgrid; ++j) {
          double t = double(j) / tgrid;
          sup = std::max(sup, std::abs(profile(exact - t) - profile(lin - t)));
        }
      }
    }

    // oscillation of h over level-m cells, corner values are exact
    double osc = 0.0;
    std::vector<Cell> cells;
    collect_cells(0, 0, 1 << m, cells);
    for (const Cell& cell : cells) {
      double v0 = h_true.at({cell.x * 16, cell.y * 16});
      double v1 = h_true.at({(cell.x + 1) * 16, cell.y * 16});
      double v2 = h_true.at({cell.x * 16, (cell.y + 1) * 16});
      osc = std::max(osc, std::max({v0, v1, v2}) - std::min({v0, v1, v2}));
    }
    rows.push_back({m, sup, profile_derivative_sup * osc});
  }
  return rows;
}

std::string convergence_to_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "level,sup_error,osc_bound\n";
  for (const auto& r : rows)
    out += std::to_string(r.level) + "," + report::num(r.sup_error) + "," + report::num(r.osc_bound) + "\n";
  return out;
}

}  // namespace mgt
