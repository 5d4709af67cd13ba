#pragma once

#include <Eigen/Dense>

#include "mgt/elliptic.hpp"

namespace mgt {

struct DomainCheck {
  bool in_domain = false;
  double max_residual = 0.0;
  std::vector<double> vertex_residuals;  // one per vertex, boundary entries 0
};

// Membership test for D(dbot_B): edge-wise H^1 components and, at every
// vertex p outside B, the weighted Kirchhoff balance
//   sum_{head=p} c_e b_e f_e(1) = sum_{tail=p} c_e b_e f_e(0).
DomainCheck check_domain(const EdgeFunction& f, const VelocityField& b);

// (dbot_B f)_e = f_e' / b_e; requires check_domain to pass.
EdgeFunction apply_dbot(const EdgeFunction& f, const VelocityField& b);
EdgeFunction apply_dbot_unchecked(const EdgeFunction& f, const VelocityField& b);

// Data of the representation f = g + star_b^{-1} du + w with
// dbot_B f = star_b^{-1} dg + z; gauge g(root) = u(root) = 0.
struct KeyDecomposition {
  ContinuousFunction g;
  ContinuousFunction u;      // edge-wise quadratic Neumann solution
  std::vector<double> w, z;  // edge constants, both in ker dbot
  std::vector<double> n_fb;  // n_B(f b) per boundary vertex (graph boundary order)
  std::vector<double> du_b;  // (du)_B per boundary vertex
  std::vector<double> g_b;   // g on the boundary

  EdgeFunction w_fn() const { return EdgeFunction::edge_constants(g.graph(), w); }
  EdgeFunction z_fn() const { return EdgeFunction::edge_constants(g.graph(), z); }
  // g + star^{-1} du + w in the representation of g
  EdgeFunction reconstruct(const VelocityField& b) const;
};

KeyDecomposition key_decompose(const EdgeFunction& f, const VelocityField& b);
KeyDecomposition key_decompose(const EdgeFunction& f, const VelocityField& b, const CycleBasis& basis);

// |LHS - RHS| of the integration by parts identity
//   <dbot f1, f2> + <f1, dbot f2>
//     = sum_B { g2 n_B(f1 b) + g1 n_B(f2 b) - g1 g2 n_B b } + <w1,z2> + <z1,w2>.
double ibp_check(const EdgeFunction& f1, const EdgeFunction& f2, const VelocityField& b);

nlohmann::ordered_json key_decomposition_to_json(const KeyDecomposition& kd, const VelocityField& b);

// Random POLY element of D(dbot_B): random coefficients with the traces
// projected onto the weighted Kirchhoff constraints. Deterministic in seed.
EdgeFunction random_domain_element(const VelocityField& b, std::uint64_t seed, int degree = 7);

// Linear maps from the trace vector T = (f_e(0), f_e(1))_e in R^{2|E|} to the
// finite data of the key decomposition. All boundary functionals of the
// quadruple maps factor through these. Rows are valid on D(dbot_B) and extend
// it linearly off the domain, which is what the resolvent assembly needs.
struct TraceCalculus {
  GraphPtr graph;
  VelocityField b;
  CycleBasis cycles;
  Eigen::MatrixXd Z;    // |E|  x 2|E|, z edge constants
  Eigen::MatrixXd V;    // |E|  x 2|E|, cycle part of (f_e') (= b z)
  Eigen::MatrixXd Gv;   // |V|  x 2|E|, g vertex values, g(root) = 0
  Eigen::MatrixXd Uv;   // |V|  x 2|E|, u vertex values, u(root) = 0
  Eigen::MatrixXd W;    // |E|  x 2|E|, w edge constants
  Eigen::MatrixXd Nfb;  // |B|  x 2|E|, n_B(f b)
  Eigen::MatrixXd Dub;  // |B|  x 2|E|, (du)_B of the computed u
  Eigen::MatrixXd Kir;  // interior weighted Kirchhoff rows (|V|-|B| x 2|E|)

  Eigen::VectorXd traces(const EdgeFunction& f) const;
};

TraceCalculus build_trace_calculus(const VelocityField& b);

}  // namespace mgt
