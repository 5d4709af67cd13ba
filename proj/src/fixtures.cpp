#include "mgt/fixtures.hpp"

#include "mgt/elliptic.hpp"
#include "mgt/sierpinski.hpp"

namespace mgt {

namespace {

using EdgeSpec = std::tuple<std::string, std::string, std::string, double>;

Fixture make(const std::string& name, std::vector<std::string> verts, std::vector<EdgeSpec> edges,
             std::vector<std::string> boundary, std::vector<double> b) {
  std::map<std::string, double> field_doc;
  for (size_t e = 0; e < edges.size(); ++e) field_doc[std::get<0>(edges[e])] = b[e];
  MetricGraph g = MetricGraph::build(std::move(verts), std::move(edges), std::move(boundary), {{"b", field_doc}});
  GraphPtr gp = make_graph(std::move(g));
  return {name, gp, field_from_document(gp, "b")};
}

Fixture sg_fixture(const std::string& name, int level, bool reduced) {
  SGLevelGraph sg = sg_graph(level, reduced);
  auto data = sg_case_data(reduced ? SgCase::normal_reduced : SgCase::degenerate);
  ContinuousFunction h = sg_harmonic(sg, data[0], data[1], data[2]);
  std::vector<double> slopes(sg.graph->edge_count());
  for (int e = 0; e < sg.graph->edge_count(); ++e)
    slopes[e] = h.vertex_value(sg.graph->edge(e).head) - h.vertex_value(sg.graph->edge(e).tail);
  std::map<std::string, double> field_doc;
  for (int e = 0; e < sg.graph->edge_count(); ++e) field_doc[sg.graph->edge(e).id] = slopes[e];
  // rebuild with the field embedded so the document round-trips
  std::vector<EdgeSpec> edges;
  for (const Edge& e : sg.graph->edges())
    edges.emplace_back(e.id, sg.graph->vertex_id(e.tail), sg.graph->vertex_id(e.head), e.conductance);
  std::vector<std::string> boundary;
  for (int q : sg.graph->boundary()) boundary.push_back(sg.graph->vertex_id(q));
  MetricGraph g = MetricGraph::build(sg.graph->vertex_ids(), std::move(edges), std::move(boundary),
                                     {{"b", field_doc}});
  GraphPtr gp = make_graph(std::move(g));
  return {name, gp, field_from_document(gp, "b")};
}

}  // namespace

Fixture fixture(const std::string& name) {
  if (name == "interval")
    return make(name, {"q0", "q1"}, {{"e", "q0", "q1", 1.0}}, {"q0", "q1"}, {1.0});
  if (name == "circles")
    return make(name, {"p"}, {{"C1", "p", "p", 1.0}, {"C2", "p", "p", 1.0}}, {}, {1.0, 2.0});
  if (name == "circles-equal")
    return make(name, {"p"}, {{"C1", "p", "p", 1.0}, {"C2", "p", "p", 1.0}}, {}, {1.0, 1.0});
  if (name == "star-tree")
    return make(name, {"q0", "q1", "q2", "p"},
                {{"e0", "q0", "p", 1.0}, {"e1", "p", "q1", 1.0}, {"e2", "p", "q2", 1.0}},
                {"q0", "q1", "q2"}, {2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  if (name == "k1") {
    // first gasket approximation with the standard field: outer cycle 1,
    // inner cycle 2, counterclockwise
    return make(name, {"q0", "q1", "q2", "p0", "p1", "p2"},
                {{"q0p2", "q0", "p2", 1.0},
                 {"p2q1", "p2", "q1", 1.0},
                 {"q1p0", "q1", "p0", 1.0},
                 {"p0q2", "p0", "q2", 1.0},
                 {"q2p1", "q2", "p1", 1.0},
                 {"p1q0", "p1", "q0", 1.0},
                 {"p0p1", "p0", "p1", 1.0},
                 {"p1p2", "p1", "p2", 1.0},
                 {"p2p0", "p2", "p0", 1.0}},
                {}, {1, 1, 1, 1, 1, 1, 2, 2, 2});
  }
  if (name == "sg1") return sg_fixture(name, 1, false);
  if (name == "sg2") return sg_fixture(name, 2, false);
  if (name == "sg3") return sg_fixture(name, 3, false);
  if (name == "sg1-reduced") return sg_fixture(name, 1, true);
  if (name == "sg2-reduced") return sg_fixture(name, 2, true);
  if (name == "sg3-reduced") return sg_fixture(name, 3, true);
  fail(errc::bad_document, "unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() {
  return {"interval", "circles", "circles-equal", "star-tree", "k1",
          "sg1",      "sg2",     "sg3",           "sg1-reduced", "sg2-reduced", "sg3-reduced"};
}

}  // namespace mgt
