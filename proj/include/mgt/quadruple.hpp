#pragma once

#include "mgt/decomp.hpp"

namespace mgt {

enum class Side { minus, plus };

// Sign partition of the boundary by n_B b, with the |n_B b| weights carried
// by the B-check and B-hat blocks.
struct BoundaryPartition {
  std::vector<int> zero, neg, pos;          // vertex indices: n_B b = 0 / < 0 / > 0
  std::vector<double> weight_neg, weight_pos;  // |n_B b|
  double balance_defect = 0.0;              // | sum_neg |n| - sum_pos |n| |
};

BoundaryPartition partition_boundary(const VelocityField& b);

// The weighted spaces H~pm, the removed directions, the projections and the
// trace-linear G-maps of the boundary quadruple for (-star_b^{-1} d_B, C_B).
// Solenoidal fields get the single-space construction over l(B) + ker dbot;
// general divergence-free fields the four-block construction.
class QuadrupleSpaces {
 public:
  static QuadrupleSpaces build(const VelocityField& field);

  const VelocityField& field() const { return field_; }
  const GraphPtr& graph() const { return field_.graph; }
  const TraceCalculus& calculus() const { return tc_; }
  const BoundaryPartition& partition() const { return part_; }
  bool solenoidal() const { return solenoidal_; }

  int raw_dim() const { return static_cast<int>(metric_.size()); }
  int kernel_rank() const { return static_cast<int>(psi_.cols()); }
  int dim_hminus() const { return raw_dim() - 1; }
  int dim_hplus() const { return raw_dim() - 1; }

  // raw layout: solenoidal [B | kernel]; general [B-zero | B-neg | B-pos | kernel]
  int offset_zero() const { return 0; }
  int offset_neg() const { return static_cast<int>(part_.zero.size()); }
  int offset_pos() const { return offset_neg() + static_cast<int>(part_.neg.size()); }
  int offset_kernel() const { return raw_dim() - kernel_rank(); }

  double raw_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  Eigen::VectorXd removed_direction(Side s) const { return s == Side::minus ? dminus_ : dplus_; }
  Eigen::VectorXd project(Side s, const Eigen::VectorXd& raw) const;
  const Eigen::MatrixXd& onb(Side s) const { return s == Side::minus ? onb_minus_ : onb_plus_; }
  Eigen::VectorXd onb_coords(Side s, const Eigen::VectorXd& raw) const;
  Eigen::VectorXd raw_from_onb(Side s, const Eigen::VectorXd& coords) const;

  // G maps, through the trace calculus (result independent of the gauge)
  Eigen::VectorXd apply_G(Side s, const EdgeFunction& f) const;          // projected raw coords
  Eigen::VectorXd apply_G_onb(Side s, const EdgeFunction& f) const;
  // same from an explicit representation; used to confirm gauge invariance
  Eigen::VectorXd apply_G_from_decomposition(Side s, const KeyDecomposition& kd) const;

  // |  (<A f1, f2> + <f1, A f2>)  -  (<G+f1,G+f2> - <G-f1,G-f2>)  | with A = -dbot_B
  double identity_check(const EdgeFunction& f1, const EdgeFunction& f2) const;

  // Proof-of-surjectivity construction: inputs are raw H~pm coordinates read
  // as representatives of their H-/H+ classes.
  EdgeFunction construct_preimage(const Eigen::VectorXd& f_minus_raw, const Eigen::VectorXd& f_plus_raw) const;

  struct ContractionCheck {
    bool contraction = false;
    double sigma_max = 0.0;
  };
  // largest singular value of Theta (given in onb coordinates) against 1
  ContractionCheck check_contraction(const Eigen::MatrixXd& theta_onb) const;

  // ker dbot coordinates (orthonormal basis psi) of an edge-constant function
  Eigen::VectorXd kernel_coords(const std::vector<double>& edge_constants) const;
  std::vector<double> kernel_to_edge_constants(const Eigen::VectorXd& coords) const;
  const Eigen::MatrixXd& kernel_basis() const { return psi_; }

  // dim H+ x 2|E| rows of the onb-coordinate G maps; the resolvent couples
  // through these
  Eigen::MatrixXd g_rows_onb(Side s) const;

  nlohmann::ordered_json boundary_vector_to_json(const Eigen::VectorXd& raw) const;
  nlohmann::ordered_json describe() const;

  // Hodge split b = dh + v
  const std::vector<double>& harmonic_part_slopes() const { return h_slopes_; }
  const std::vector<double>& cycle_part() const { return v_of_b_; }
  const ContinuousFunction& harmonic_potential() const { return *h_of_b_; }

 private:
  QuadrupleSpaces() = default;
  Eigen::VectorXd raw_from_data(Side s, const std::vector<double>& g_b, const std::vector<double>& n_fb,
                                const std::vector<double>& du_b, const std::vector<double>& w,
                                const std::vector<double>& z) const;

  VelocityField field_;
  TraceCalculus tc_;
  BoundaryPartition part_;
  bool solenoidal_ = false;
  Eigen::MatrixXd psi_;            // |E| x r orthonormal kernel basis (edge constants)
  Eigen::VectorXd metric_;         // raw diagonal weights
  Eigen::VectorXd dminus_, dplus_;
  Eigen::MatrixXd onb_minus_, onb_plus_;
  Eigen::MatrixXd g_rows_minus_, g_rows_plus_;  // raw x 2|E| (unprojected)
  std::shared_ptr<ContinuousFunction> h_of_b_;
  std::vector<double> h_slopes_, v_of_b_;
};

Eigen::MatrixXd theta_from_csv(const std::string& text);
std::string theta_to_csv(const Eigen::MatrixXd& theta);

}  // namespace mgt
