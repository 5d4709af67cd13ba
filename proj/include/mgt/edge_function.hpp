#pragma once

#include <vector>

#include <json.hpp>

#include "mgt/graph.hpp"

namespace mgt {

enum class Rep { poly, sampled };

inline constexpr int kDefaultPolyDegree = 8;
inline constexpr int kMaxPolyDegree = 9;  // one above the document cap, for antiderivatives
inline constexpr int kDefaultSamples = 256;

// Scalar function given edge-wise, either as polynomial coefficients on [0,1]
// (POLY) or as n+1 uniform samples with piecewise-linear reading (SAMPLED).
// The representation is uniform across the edges of one function.
class EdgeFunction {
 public:
  EdgeFunction() = default;  // empty; assign before use

  static EdgeFunction poly(GraphPtr g, std::vector<std::vector<double>> coeffs);
  static EdgeFunction sampled(GraphPtr g, std::vector<std::vector<double>> values);
  static EdgeFunction constant(GraphPtr g, double value, Rep rep = Rep::poly, int n = kDefaultSamples);
  static EdgeFunction edge_constants(GraphPtr g, const std::vector<double>& values, Rep rep = Rep::poly,
                                     int n = kDefaultSamples);

  const GraphPtr& graph() const { return graph_; }
  Rep rep() const { return rep_; }
  // number of cells per edge (SAMPLED only)
  int sample_cells() const { return rep_ == Rep::sampled ? static_cast<int>(data_[0].size()) - 1 : 0; }

  const std::vector<double>& edge_data(int e) const { return data_[e]; }
  std::vector<double>& edge_data(int e) { return data_[e]; }

  double eval(int e, double x) const;
  double value0(int e) const;
  double value1(int e) const;
  double mean(int e) const;
  double jump(int e) const { return value1(e) - value0(e); }

  // POLY: exact; SAMPLED: central differences at interior nodes, one-sided at
  // the ends (first order in 1/n).
  EdgeFunction derivative() const;
  EdgeFunction to_sampled(int n) const;

  bool is_edge_constant(double tol = 0.0) const;
  std::vector<double> edge_constant_values() const;

  EdgeFunction& operator+=(const EdgeFunction& o);
  EdgeFunction& operator-=(const EdgeFunction& o);
  EdgeFunction& operator*=(double s);
  friend EdgeFunction operator+(EdgeFunction a, const EdgeFunction& b) { return a += b; }
  friend EdgeFunction operator-(EdgeFunction a, const EdgeFunction& b) { return a -= b; }
  friend EdgeFunction operator*(double s, EdgeFunction a) { return a *= s; }

  double max_abs_value() const;
  double min_sample_value() const;  // SAMPLED only

  nlohmann::ordered_json to_json() const;
  static EdgeFunction from_json(GraphPtr g, const nlohmann::json& j);

 private:
  EdgeFunction(GraphPtr g, Rep rep, std::vector<std::vector<double>> data)
      : graph_(std::move(g)), rep_(rep), data_(std::move(data)) {}

  GraphPtr graph_;
  Rep rep_ = Rep::poly;
  std::vector<std::vector<double>> data_;
};

struct TraceMean {
  double v0 = 0.0, v1 = 0.0, mean = 0.0;
};
using TraceMeanVector = std::vector<TraceMean>;

TraceMeanVector trace_mean(const EdgeFunction& f);

// Element of H^1(X): edge-wise H^1 function that is continuous across
// vertices. Carries the matching vertex values explicitly.
class ContinuousFunction {
 public:
  // edge-wise linear interpolation of vertex values
  static ContinuousFunction interpolate(GraphPtr g, std::vector<double> vertex_values, Rep rep = Rep::poly,
                                        int n = kDefaultSamples);
  // attach vertex values to an edge function; endpoint traces are nudged by a
  // linear correction so they match the vertex values exactly
  static ContinuousFunction attach(EdgeFunction f, std::vector<double> vertex_values);

  const EdgeFunction& edge_function() const { return f_; }
  const GraphPtr& graph() const { return f_.graph(); }
  const std::vector<double>& vertex_values() const { return vertex_values_; }
  double vertex_value(int v) const { return vertex_values_[v]; }
  double eval(int e, double x) const { return f_.eval(e, x); }

  double max_trace_defect() const;

  ContinuousFunction& operator+=(const ContinuousFunction& o);
  ContinuousFunction& operator*=(double s);

 private:
  ContinuousFunction(EdgeFunction f, std::vector<double> vv) : f_(std::move(f)), vertex_values_(std::move(vv)) {}
  EdgeFunction f_;
  std::vector<double> vertex_values_;
};

void require_same_graph(const EdgeFunction& a, const EdgeFunction& b);
void require_same_rep(const EdgeFunction& a, const EdgeFunction& b);

// sum_e w_e int_0^1 f1 f2 dx. POLY pairs use exact monomial integration,
// SAMPLED pairs the composite trapezoid rule on the product.
double weighted_inner(const EdgeFunction& f1, const EdgeFunction& f2, const std::vector<double>& weights);

// Same weights but with the exact piecewise-linear product integral in the
// SAMPLED case. Conserved quantities of the evolution are measured in this
// norm, which is the honest L^2 norm of the piecewise-linear interpolant.
double weighted_inner_consistent(const EdgeFunction& f1, const EdgeFunction& f2, const std::vector<double>& weights);

// <v1, v2>_H = sum_e c_e int v1 v2 for edge functions read as 1-form coefficients
double h_inner(const EdgeFunction& v1, const EdgeFunction& v2);

// sum_e c_e b_e int f phi' dx  (= <f b, d phi>_H for edge-constant b)
double field_pairing(const EdgeFunction& f, const ContinuousFunction& phi, const std::vector<double>& b);

// Dirichlet energy sum_e c_e int (f')^2
double dirichlet_energy(const ContinuousFunction& f);

}  // namespace mgt
