#include "mgt/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include <json.hpp>

#include "mgt/report.hpp"

namespace mgt {

const char* errc_name(errc c) {
  switch (c) {
    case errc::ok: return "OK";
    case errc::disconnected: return "DISCONNECTED";
    case errc::nonpositive_conductance: return "NONPOSITIVE_CONDUCTANCE";
    case errc::duplicate_id: return "DUPLICATE_ID";
    case errc::unknown_vertex: return "UNKNOWN_VERTEX";
    case errc::bad_document: return "BAD_DOCUMENT";
    case errc::graph_mismatch: return "GRAPH_MISMATCH";
    case errc::representation_mismatch: return "REPRESENTATION_MISMATCH";
    case errc::not_energy_dominant: return "NOT_ENERGY_DOMINANT";
    case errc::singular_gram: return "SINGULAR_GRAM";
    case errc::not_boundary_vertex: return "NOT_BOUNDARY_VERTEX";
    case errc::empty_boundary: return "EMPTY_BOUNDARY";
    case errc::incompatible_data: return "INCOMPATIBLE_DATA";
    case errc::unsupported_rhs: return "UNSUPPORTED_RHS";
    case errc::not_in_domain: return "NOT_IN_DOMAIN";
    case errc::field_invalid: return "FIELD_INVALID";
    case errc::dimension_mismatch: return "DIMENSION_MISMATCH";
    case errc::not_contraction: return "NOT_CONTRACTION";
    case errc::singular_system: return "SINGULAR_SYSTEM";
    case errc::uncovered_vertex: return "UNCOVERED_VERTEX";
    case errc::not_in_catalog: return "NOT_IN_CATALOG";
    case errc::level_too_large: return "LEVEL_TOO_LARGE";
    case errc::level_insufficient: return "LEVEL_INSUFFICIENT";
    case errc::profile_not_periodic: return "PROFILE_NOT_PERIODIC";
    case errc::initial_mismatch: return "INITIAL_MISMATCH";
    case errc::io_error: return "IO_ERROR";
    case errc::usage: return "USAGE";
  }
  return "UNKNOWN";
}

MetricGraph MetricGraph::build(std::vector<std::string> vertex_ids,
                               std::vector<std::tuple<std::string, std::string, std::string, double>> edges,
                               std::vector<std::string> boundary,
                               std::map<std::string, std::map<std::string, double>> fields) {
  MetricGraph g;
  g.vertex_ids_ = std::move(vertex_ids);
  for (int v = 0; v < static_cast<int>(g.vertex_ids_.size()); ++v) {
    if (!g.vertex_lookup_.emplace(g.vertex_ids_[v], v).second)
      fail(errc::duplicate_id, "vertex id '" + g.vertex_ids_[v] + "'");
  }
  for (auto& [id, tail, head, c] : edges) {
    Edge e;
    e.id = id;
    auto t = g.vertex_lookup_.find(tail);
    auto h = g.vertex_lookup_.find(head);
    if (t == g.vertex_lookup_.end()) fail(errc::unknown_vertex, "edge '" + id + "' tail '" + tail + "'");
    if (h == g.vertex_lookup_.end()) fail(errc::unknown_vertex, "edge '" + id + "' head '" + head + "'");
    e.tail = t->second;
    e.head = h->second;
    e.conductance = c;
    if (!g.edge_lookup_.emplace(id, static_cast<int>(g.edges_.size())).second)
      fail(errc::duplicate_id, "edge id '" + id + "'");
    g.edges_.push_back(e);
  }
  std::set<int> bset;
  for (auto& id : boundary) {
    auto it = g.vertex_lookup_.find(id);
    if (it == g.vertex_lookup_.end()) fail(errc::unknown_vertex, "boundary vertex '" + id + "'");
    bset.insert(it->second);
  }
  g.boundary_.assign(bset.begin(), bset.end());
  for (auto& [name, values] : fields) {
    std::vector<double> coeff(g.edges_.size(), 0.0);
    for (auto& [eid, val] : values) {
      auto it = g.edge_lookup_.find(eid);
      if (it == g.edge_lookup_.end()) fail(errc::bad_document, "field '" + name + "' names unknown edge '" + eid + "'");
      coeff[it->second] = val;
    }
    g.fields_.emplace(name, std::move(coeff));
  }
  g.index();
  g.validate();
  return g;
}

void MetricGraph::index() {
  boundary_mask_.assign(vertex_ids_.size(), 0);
  for (int v : boundary_) boundary_mask_[v] = 1;
  in_.assign(vertex_ids_.size(), {});
  out_.assign(vertex_ids_.size(), {});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    in_[edges_[e].head].push_back(e);
    out_[edges_[e].tail].push_back(e);
  }
}

void MetricGraph::validate() const {
  if (vertex_ids_.empty()) fail(errc::bad_document, "graph has no vertices");
  for (const Edge& e : edges_) {
    if (!(e.conductance > 0.0))
      fail(errc::nonpositive_conductance, "edge '" + e.id + "' has conductance " + std::to_string(e.conductance));
  }
  // connectivity of the underlying multigraph
  std::vector<char> seen(vertex_ids_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    auto visit = [&](int w) {
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    };
    for (int e : in_[v]) visit(edges_[e].tail);
    for (int e : out_[v]) visit(edges_[e].head);
  }
  for (size_t v = 0; v < seen.size(); ++v)
    if (!seen[v]) fail(errc::disconnected, "vertex '" + vertex_ids_[v] + "' unreachable");
}

void MetricGraph::require_boundary(int v) const {
  if (v < 0 || v >= vertex_count())
    fail(errc::not_boundary_vertex, "vertex index " + std::to_string(v) + " out of range");
  if (!boundary_mask_[v]) fail(errc::not_boundary_vertex, "'" + vertex_ids_[v] + "'");
}

int MetricGraph::vertex_index(const std::string& id) const {
  auto it = vertex_lookup_.find(id);
  if (it == vertex_lookup_.end()) fail(errc::unknown_vertex, "'" + id + "'");
  return it->second;
}

int MetricGraph::edge_index(const std::string& id) const {
  auto it = edge_lookup_.find(id);
  if (it == edge_lookup_.end()) fail(errc::bad_document, "unknown edge '" + id + "'");
  return it->second;
}

const std::vector<double>& MetricGraph::field(const std::string& name) const {
  auto it = fields_.find(name);
  if (it == fields_.end()) fail(errc::bad_document, "graph has no field '" + name + "'");
  return it->second;
}

std::vector<std::string> MetricGraph::field_names() const {
  std::vector<std::string> names;
  for (auto& [name, _] : fields_) names.push_back(name);
  return names;
}

MetricGraph MetricGraph::from_document(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const std::exception& ex) {
    fail(errc::bad_document, ex.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges"))
    fail(errc::bad_document, "expected object with 'vertices' and 'edges'");
  std::vector<std::string> vertices;
  for (auto& v : doc["vertices"]) {
    if (!v.is_string()) fail(errc::bad_document, "vertex ids must be strings");
    vertices.push_back(v.get<std::string>());
  }
  std::vector<std::tuple<std::string, std::string, std::string, double>> edges;
  for (auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("id") || !e.contains("tail") || !e.contains("head"))
      fail(errc::bad_document, "edge entries need id, tail, head");
    double c = e.value("conductance", 1.0);
    edges.emplace_back(e["id"].get<std::string>(), e["tail"].get<std::string>(), e["head"].get<std::string>(), c);
  }
  std::vector<std::string> boundary;
  if (doc.contains("boundary"))
    for (auto& b : doc["boundary"]) boundary.push_back(b.get<std::string>());
  std::map<std::string, std::map<std::string, double>> fields;
  if (doc.contains("fields")) {
    for (auto& [name, entry] : doc["fields"].items()) {
      std::map<std::string, double> values;
      for (auto& [eid, val] : entry.items()) values[eid] = val.get<double>();
      fields[name] = std::move(values);
    }
  }
  return build(std::move(vertices), std::move(edges), std::move(boundary), std::move(fields));
}

std::string MetricGraph::to_document() const {
  nlohmann::ordered_json doc;
  doc["vertices"] = vertex_ids_;
  doc["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : edges_) {
    nlohmann::ordered_json je;
    je["id"] = e.id;
    je["tail"] = vertex_ids_[e.tail];
    je["head"] = vertex_ids_[e.head];
    je["conductance"] = e.conductance;
    doc["edges"].push_back(je);
  }
  doc["boundary"] = nlohmann::ordered_json::array();
  for (int v : boundary_) doc["boundary"].push_back(vertex_ids_[v]);
  if (!fields_.empty()) {
    nlohmann::ordered_json jf;
    for (auto& [name, coeff] : fields_) {
      nlohmann::ordered_json entry;
      for (int e = 0; e < edge_count(); ++e) entry[edges_[e].id] = coeff[e];
      jf[name] = entry;
    }
    doc["fields"] = jf;
  }
  return report::dump_json(doc);
}

}  // namespace mgt
