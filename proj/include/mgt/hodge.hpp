#pragma once

#include <Eigen/Dense>

#include "mgt/edge_function.hpp"

namespace mgt {

// Edge-wise constant 1-form b dx with cached structure flags and the weights
// c_e b_e^2 of its energy measure nu_b.
struct VelocityField {
  GraphPtr graph;
  std::vector<double> b;            // one coefficient per edge
  bool minimal_energy_dominant = false;
  bool divergence_free_wrt_B = false;
  bool solenoidal = false;          // divergence free at every vertex (B = empty case)
  double max_kirchhoff_residual = 0.0;
  std::vector<double> nu_weights;   // c_e b_e^2

  double total_mass() const;  // nu_b(X)
  void require_valid() const; // med + divergence free wrt B, else FIELD_INVALID
};

VelocityField check_field(GraphPtr g, std::vector<double> coefficients);
VelocityField field_from_document(GraphPtr g, const std::string& name);

double l2nu_inner(const EdgeFunction& f1, const EdgeFunction& f2, const VelocityField& b);
double l2nu_inner_consistent(const EdgeFunction& f1, const EdgeFunction& f2, const VelocityField& b);
double l2nu_norm(const EdgeFunction& f, const VelocityField& b);

// Fundamental cycles of a BFS spanning tree rooted at the lexicographically
// smallest vertex id, as +-1/0 edge-constant forms, with their H-Gram matrix.
struct CycleBasis {
  GraphPtr graph;
  std::vector<std::vector<double>> cycles;  // each of length |E|
  Eigen::MatrixXd gram;                     // conductance-weighted
  std::vector<int> tree_parent_edge;        // per vertex, -1 at the root
  std::vector<int> bfs_order;
  int root = 0;

  int rank() const { return static_cast<int>(cycles.size()); }
};

CycleBasis cycle_basis(GraphPtr g);

// (star_b^{-1} v)_e = v_e / b_e; requires minimal energy dominance.
EdgeFunction star_inv(const VelocityField& b, const EdgeFunction& v);

struct HodgeDecomposition {
  ContinuousFunction g;         // gradient potential, g(root) = 0
  std::vector<double> cycle;    // edge coefficients of the ker d* part
};

// Orthogonal splitting F = dg + v in H with v in the cycle space.
HodgeDecomposition hodge_decompose(const EdgeFunction& form, const CycleBasis& basis);
HodgeDecomposition hodge_decompose(const EdgeFunction& form);

// Signed boundary flux of an edge-wise H^1 1-form at a boundary vertex:
// n_B v(q) = sum_{head=q} c_e v_e(1) - sum_{tail=q} c_e v_e(0).
double normal_part(const EdgeFunction& v, int q);
// same for the 1-form f b with f given by traces
double normal_part_fb(const TraceMeanVector& f, const VelocityField& b, int q);
double normal_part_fb(const EdgeFunction& f, const VelocityField& b, int q);
// n_B b(q) for the edge-constant field itself
double normal_part_field(const VelocityField& b, int q);

std::string cycles_to_csv(const CycleBasis& basis);

}  // namespace mgt
