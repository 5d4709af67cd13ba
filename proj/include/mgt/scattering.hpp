#pragma once

#include "mgt/generator.hpp"

namespace mgt {

// Vertex scattering rules for the catalogued local dynamics. Flow on edge e
// moves with parametric speed 1/b_e along the orientation for b_e > 0 and
// against it for b_e < 0. Each edge has one entry slot (where flow enters)
// and one exit slot; a rule expresses every entry trace as an affine
// combination of exit traces. An empty term list means zero inflow.
struct ScatteringRule {
  struct Row {
    std::vector<std::pair<int, double>> terms;  // (edge whose exit feeds in, coefficient)
    double offset = 0.0;
    bool covered = false;
  };
  std::string tag = "custom";
  std::vector<Row> entry;  // indexed by edge

  void require_covering(const MetricGraph& g) const;
};

// interval with boundary condition theta v(t,1) = -v(t,0)
ScatteringRule rule_interval(const VelocityField& b, double theta);
// two glued circles, equal coefficient, hinge parameter theta_bar
ScatteringRule rule_circles(const VelocityField& b, double theta_bar);
// conservative trace mixing at every vertex with balanced flux, plus optional
// periodic links from outflow to inflow boundary vertices
ScatteringRule rule_flow_continuity(const VelocityField& b,
                                    const std::vector<std::pair<int, int>>& links = {},
                                    const std::string& tag = "flow-continuity");
// gasket graph, Theta = id: midpoint mixing with the per-cell jump coupling
// that keeps every triangle circulation coordinate at zero
ScatteringRule rule_k1_identity(const VelocityField& b);

Trajectory evolve_scattering(const VelocityField& b, const ScatteringRule& rule, const EdgeFunction& v0,
                             double dt, double t_end, const EvolveOptions& opts = {});

}  // namespace mgt
