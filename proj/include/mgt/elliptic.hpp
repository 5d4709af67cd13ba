#pragma once

#include <map>

#include "mgt/hodge.hpp"

namespace mgt {

// Edge-wise linear function, continuous, with the conductance-weighted
// Kirchhoff balance of slopes at every vertex outside B and the given values
// on B. Unique; B must be nonempty.
ContinuousFunction harmonic_extend(GraphPtr g, const std::map<std::string, double>& boundary_values);
ContinuousFunction harmonic_extend(GraphPtr g, const std::vector<double>& values_on_B);

// Neumann problem  Delta_B u = z on X \ B,  (du)_B = eta on B,  with
// Delta_B u = u_e'' / b_e^2 per edge. For B empty this is the Poisson problem
// and eta is ignored. Right-hand sides are edge-wise constant.
struct NeumannProblem {
  VelocityField field;
  EdgeFunction z;
  std::map<std::string, double> eta;
};

ContinuousFunction solve_neumann(const NeumannProblem& problem);
ContinuousFunction solve_neumann_constants(const VelocityField& b, const std::vector<double>& z,
                                           const std::vector<double>& eta_on_B);

// (du)_B(q) = sum_{head=q} c_e u_e'(1) - sum_{tail=q} c_e u_e'(0)
double normal_derivative(const ContinuousFunction& u, int q);

// conductance-weighted Kirchhoff slope residual at a vertex (0 where harmonic)
double kirchhoff_slope_residual(const ContinuousFunction& u, int v);

}  // namespace mgt
