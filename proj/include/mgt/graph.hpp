#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mgt/errors.hpp"

namespace mgt {

// Directed edge of a metric graph. The edge is a copy of [0,1] with the tail
// glued at parameter 0 and the head at parameter 1. Loops (tail == head) keep
// distinct 0- and 1-traces.
struct Edge {
  std::string id;
  int tail = -1;
  int head = -1;
  double conductance = 1.0;
};

// Conductance-weighted finite directed multigraph with unit-parametrized edges
// and a designated (possibly empty) boundary vertex set. Immutable once built.
class MetricGraph {
 public:
  static MetricGraph build(std::vector<std::string> vertex_ids,
                           std::vector<std::tuple<std::string, std::string, std::string, double>> edges,
                           std::vector<std::string> boundary,
                           std::map<std::string, std::map<std::string, double>> fields = {});

  // Parses the JSON graph document (keys: vertices, edges, boundary, fields).
  static MetricGraph from_document(const std::string& json_text);
  std::string to_document() const;

  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int cycle_rank() const { return edge_count() - vertex_count() + 1; }

  const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
  const std::string& vertex_id(int v) const { return vertex_ids_[v]; }
  int vertex_index(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  int edge_index(const std::string& id) const;

  const std::vector<int>& boundary() const { return boundary_; }
  bool is_boundary(int v) const { return boundary_mask_[v]; }
  // validates the index and that the vertex lies on the boundary
  void require_boundary(int v) const;
  int interior_count() const { return vertex_count() - static_cast<int>(boundary_.size()); }

  // Edges incident to v from the head side (flow arrives at parameter 1).
  const std::vector<int>& edges_in(int v) const { return in_[v]; }
  // Edges incident to v from the tail side (parameter 0).
  const std::vector<int>& edges_out(int v) const { return out_[v]; }

  bool has_field(const std::string& name) const { return fields_.count(name) > 0; }
  const std::vector<double>& field(const std::string& name) const;
  std::vector<std::string> field_names() const;

 private:
  MetricGraph() = default;
  void index();
  void validate() const;

  std::vector<std::string> vertex_ids_;
  std::map<std::string, int> vertex_lookup_;
  std::vector<Edge> edges_;
  std::map<std::string, int> edge_lookup_;
  std::vector<int> boundary_;
  std::vector<char> boundary_mask_;
  std::vector<std::vector<int>> in_, out_;
  std::map<std::string, std::vector<double>> fields_;
};

using GraphPtr = std::shared_ptr<const MetricGraph>;

inline GraphPtr make_graph(MetricGraph g) { return std::make_shared<const MetricGraph>(std::move(g)); }

}  // namespace mgt
