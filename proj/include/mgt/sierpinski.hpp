#pragma once

#include <array>
#include <functional>
#include <map>

#include "mgt/generator.hpp"

namespace mgt {

// Level-m metric graph approximation of the gasket. Vertices live on the
// triangular lattice spanned by the directions q1->q2 and q1->q0, in units of
// 2^-m; every edge carries conductance (5/3)^m. Cells are oriented A -> B ->
// C -> A with A the local q1 corner, B the local q2 corner, C the local q0
// corner.
struct SGLevelGraph {
  int level = 0;
  bool reduced = false;
  GraphPtr graph;
  std::vector<std::pair<int, int>> coords;       // lattice coordinates per vertex
  std::array<int, 3> corners = {0, 0, 0};        // vertex indices of q0, q1, q2
  std::vector<std::array<int, 3>> cells;         // per cell: vertex indices (A, B, C)
  std::vector<std::array<int, 3>> cell_edges;    // per cell: edge indices (AB, BC, CA); -1 if removed
};

inline constexpr int kMaxSgLevel = 8;

SGLevelGraph sg_graph(int level, bool reduced = false);

// vertex values of the harmonic function with the given V0 data, by the
// midpoint extension rule; keys are lattice coordinates at scale 2^level
std::map<std::pair<int, int>, double> sg_harmonic_values(int level, double at_q0, double at_q1, double at_q2);

ContinuousFunction sg_harmonic(const SGLevelGraph& sg, double at_q0, double at_q1, double at_q2);

VelocityField sg_velocity(const SGLevelGraph& sg, const ContinuousFunction& h);

// graph restriction of the piecewise-harmonic divergence-free form attached
// to the cell addressed by the word (letters in {0,1,2}, digit k = toward
// corner q_k); needs level >= |word| + 1
std::vector<double> sg_dzeta(const SGLevelGraph& sg, const std::vector<int>& word);

enum class SgCase {
  normal_reduced,  // boundary data (0, 1, 1) on the reduced graph
  degenerate,      // boundary data (1/2, 0, 1) on the full graph
};

std::array<double, 3> sg_case_data(SgCase c);

// pointwise pull-back V(h^(m)(x) - t) on the sampled grid
EdgeFunction cylindrical_solution(const SGLevelGraph& sg, SgCase c, const std::function<double(double)>& profile,
                                  double t, int n);

struct ConvergenceRow {
  int level = 0;
  double sup_error = 0.0;
  double osc_bound = 0.0;  // sup|V'| times the largest cell oscillation of h
};

std::vector<ConvergenceRow> convergence_experiment(const std::function<double(double)>& profile,
                                                   double profile_derivative_sup, SgCase c,
                                                   const std::vector<int>& levels);

std::string convergence_to_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace mgt
