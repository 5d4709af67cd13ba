#pragma once

#include <functional>

#include "mgt/quadruple.hpp"

namespace mgt {

// Linear contraction Theta : H- -> H+, stored in the orthonormal coordinates
// of the quadruple spaces. Catalog constructors set the tag; the per-adjoint
// flag marks the cases whose kernel projection is conserved by the flow.
struct Contraction {
  Eigen::MatrixXd theta;
  std::string tag = "custom";
  bool peradjoint_catalog = false;
};

Contraction theta_zero(const QuadrupleSpaces& qs);
Contraction theta_scalar(const QuadrupleSpaces& qs, double value);
Contraction theta_identity(const QuadrupleSpaces& qs);  // solenoidal spaces only
// raw-coordinate block operator: boundary_block acts on the l(B) sections,
// the kernel section is mapped by the identity
Contraction theta_from_raw_blocks(const QuadrupleSpaces& qs, const Eigen::MatrixXd& boundary_block,
                                  const std::string& tag);
Contraction theta_tree_periodic(const QuadrupleSpaces& qs);
// reduced-gasket periodic case, boundary data (0,1,1)
Contraction theta_sg_normal_periodic(const QuadrupleSpaces& qs);
// gasket periodic case, boundary data with one zero-flux corner
Contraction theta_sg_degenerate_periodic(const QuadrupleSpaces& qs);
Contraction theta_from_matrix(const QuadrupleSpaces& qs, const Eigen::MatrixXd& m, const std::string& tag);

// two glued circles with equal coefficient c: theta from the hinge parameter
double theta_from_theta_bar(double c, double theta_bar);

struct DomainResidual {
  bool in_domain = false;
  double residual = 0.0;
};
// || Theta G- f - G+ f ||_{H+}
DomainResidual in_domain_theta(const QuadrupleSpaces& qs, const Contraction& th, const EdgeFunction& f);

// Exact per-edge solution of lambda f + dbot f = rhs subject to the interior
// weighted Kirchhoff conditions and Theta G- f = G+ f. POLY right-hand sides
// are integrated by the polynomial-exponential recurrence, SAMPLED ones by
// the exact product rule for piecewise-linear data.
struct ResolventSolution {
  EdgeFunction f;                       // SAMPLED, exact nodal values
  bool closed_form = false;             // POLY rhs path
  std::vector<double> amp, mu, anchor;  // f_e = amp e^{-mu (x - anchor)} + particular part
  // particular part, either as an explicit polynomial tail (large |mu|, the
  // coefficient recurrence is stable there) or evaluated through stable
  // exponential moments of the stored right-hand side (small |mu|)
  std::vector<char> split;
  std::vector<std::vector<double>> tail;      // split mode
  std::vector<std::vector<double>> rhs_poly;  // integral mode
  std::vector<double> bcoef;
  double value(int e, double x) const;
  double exact_l2nu_norm(const VelocityField& b) const;
};

ResolventSolution resolvent_solve(const QuadrupleSpaces& qs, const Contraction& th, double lambda,
                                  const EdgeFunction& rhs, int n_out = kDefaultSamples);

struct EvolveOptions {
  int snapshot_stride = 0;  // 0: keep first and last only
  std::vector<EdgeFunction> probes;  // continuous test functions, sampled on the grid
  int max_steps = 50'000'000;
};

struct Trajectory {
  GraphPtr graph;
  std::vector<double> times;                       // every step, including t = 0
  std::vector<double> norm;                        // consistent L2(nu_b) norm
  std::vector<double> mass;                        // integral against nu_b
  std::vector<std::vector<double>> boundary_flux;  // per step: n_B(v b)(q), boundary order
  std::vector<std::pair<double, EdgeFunction>> snapshots;
  std::vector<std::vector<double>> probe_value;    // per probe: <v, phi>_{nu_b}
  std::vector<std::vector<double>> probe_flux;     // per probe: <v b, d phi>_H

  const EdgeFunction& initial() const { return snapshots.front().second; }
  const EdgeFunction& last() const { return snapshots.back().second; }
  int steps() const { return static_cast<int>(times.size()) - 1; }
};

// Crank-Nicolson (Cayley) stepping of the constrained piecewise-linear
// discretization of A^Theta. The discrete generator inherits dissipativity
// from the quadruple identity, exactly for unitary Theta.
Trajectory evolve_cn(const QuadrupleSpaces& qs, const Contraction& th, const EdgeFunction& v0, double dt,
                     double t_end, const EvolveOptions& opts = {});

// max over recorded steps of the mass balance defect
double mass_balance_check(const Trajectory& traj);

// residual of the weak-solution identity for probe k against the time profile
// psi (with derivative dpsi), trapezoid in time
double weak_solution_check(const Trajectory& traj, int probe, const std::function<double(double)>& psi,
                           const std::function<double(double)>& dpsi);

// transport-dual reconstruction w(t) = w0 + int u ds checked against the
// integral identity; requires dbot w0 = -u(0) to within initial_tolerance
// (relative), which for SAMPLED w0 is limited by the one-sided differences at
// the edge ends
double duality_check(const Trajectory& traj, const EdgeFunction& w0, const VelocityField& b,
                     double initial_tolerance = 1e-9);

// edge-constant elements of ker A^Theta, orthonormal in L2(nu_b)
std::vector<std::vector<double>> kernel_basis_constants(const QuadrupleSpaces& qs, const Contraction& th);

// max_t || P_ker v(t) || along the CN trajectory started at v0 - P_ker v0
double kernel_invariance_check(const QuadrupleSpaces& qs, const Contraction& th, const EdgeFunction& v0,
                               double dt, double t_end);

double positivity_probe(const Trajectory& traj);

nlohmann::ordered_json trajectory_summary(const Trajectory& traj);
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace mgt
