#include "mgt/quadruple.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "mgt/report.hpp"

namespace mgt {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

// D-orthonormal basis of the orthogonal complement of d in R^n with diagonal
// metric D: Householder in the Euclidean picture y = D^(1/2) x.
Eigen::MatrixXd complement_onb(const Eigen::VectorXd& metric, const Eigen::VectorXd& d) {
  const int n = static_cast<int>(metric.size());
  Eigen::VectorXd y = d;
  for (int i = 0; i < n; ++i) y(i) *= std::sqrt(metric(i));
  double ny = y.norm();
  if (ny < 1e-300) fail(errc::singular_gram, "removed direction vanishes");
  y /= ny;
  // reflection mapping e_k -> y, k chosen for stability
  int k;
  y.cwiseAbs().maxCoeff(&k);
  Eigen::VectorXd u = y;
  u(k) += (y(k) >= 0 ? 1.0 : -1.0);
  u /= u.norm();
  Eigen::MatrixXd onb(n, n - 1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    if (j == k) continue;
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
    ej(j) = 1.0;
    Eigen::VectorXd h = ej - 2.0 * u * (u.dot(ej));  // H e_j, orthogonal to H e_k = +-y
    for (int i = 0; i < n; ++i) h(i) /= std::sqrt(metric(i));
    // canonical sign: largest-magnitude entry positive, so scalar couplings
    // have a fixed meaning on one-dimensional spaces
    int imax;
    h.cwiseAbs().maxCoeff(&imax);
    if (h(imax) < 0) h = -h;
    onb.col(col++) = h;
  }
  return onb;
}

}  // namespace

BoundaryPartition partition_boundary(const VelocityField& b) {
  BoundaryPartition p;
  double neg_sum = 0.0, pos_sum = 0.0;
  for (int q : b.graph->boundary()) {
    double n = normal_part_field(b, q);
    if (std::abs(n) <= tol::partition) {
      p.zero.push_back(q);
    } else if (n < 0) {
      p.neg.push_back(q);
      p.weight_neg.push_back(-n);
      neg_sum += -n;
    } else {
      p.pos.push_back(q);
      p.weight_pos.push_back(n);
      pos_sum += n;
    }
  }
  p.balance_defect = std::abs(neg_sum - pos_sum);
  return p;
}

QuadrupleSpaces QuadrupleSpaces::build(const VelocityField& field) {
  field.require_valid();
  QuadrupleSpaces qs;
  qs.field_ = field;
  qs.tc_ = build_trace_calculus(field);
  qs.solenoidal_ = field.solenoidal;
  qs.part_ = partition_boundary(field);
  const auto& g = field.graph;
  const int ne = g->edge_count();

  if (qs.solenoidal_) {
    // every boundary vertex has vanishing normal part
    qs.part_.zero.assign(g->boundary().begin(), g->boundary().end());
    qs.part_.neg.clear();
    qs.part_.pos.clear();
    qs.part_.weight_neg.clear();
    qs.part_.weight_pos.clear();
  } else if (qs.part_.neg.empty() || qs.part_.pos.empty()) {
    // divergence-free non-solenoidal fields always expose both signs
    fail(errc::field_invalid, "divergence-free field with one-sided boundary fluxes");
  }

  // Hodge split b = dh + v
  HodgeDecomposition hb = hodge_decompose(EdgeFunction::edge_constants(g, field.b), qs.tc_.cycles);
  qs.h_of_b_ = std::make_shared<ContinuousFunction>(hb.g);
  qs.v_of_b_ = hb.cycle;
  qs.h_slopes_.resize(ne);
  for (int e = 0; e < ne; ++e) qs.h_slopes_[e] = field.b[e] - hb.cycle[e];

  // orthonormal basis of ker dbot from the cycle images star^{-1} chi
  const int r = qs.tc_.cycles.rank();
  qs.psi_.resize(ne, r);
  if (r > 0) {
    Eigen::MatrixXd zmat(ne, r);
    for (int e = 0; e < ne; ++e)
      for (int i = 0; i < r; ++i) zmat(e, i) = qs.tc_.cycles.cycles[i][e] / field.b[e];
    Eigen::LLT<Eigen::MatrixXd> llt(qs.tc_.cycles.gram);
    if (llt.info() != Eigen::Success) fail(errc::singular_gram, "cycle Gram not positive definite");
    qs.psi_ = llt.matrixL().solve(zmat.transpose()).transpose();
  }

  const int n0 = static_cast<int>(qs.part_.zero.size());
  const int nm = static_cast<int>(qs.part_.neg.size());
  const int np = static_cast<int>(qs.part_.pos.size());
  const int raw = n0 + nm + np + r;
  if (raw < 1) fail(errc::field_invalid, "boundary quadruple is empty (no boundary, no cycles)");
  qs.metric_.resize(raw);
  for (int i = 0; i < n0; ++i) qs.metric_(i) = 1.0;
  for (int i = 0; i < nm; ++i) qs.metric_(n0 + i) = qs.part_.weight_neg[i];
  for (int i = 0; i < np; ++i) qs.metric_(n0 + nm + i) = qs.part_.weight_pos[i];
  for (int i = 0; i < r; ++i) qs.metric_(n0 + nm + np + i) = 1.0;

  // removed directions
  qs.dminus_ = Eigen::VectorXd::Zero(raw);
  qs.dplus_ = Eigen::VectorXd::Zero(raw);
  if (qs.solenoidal_) {
    Eigen::VectorXd one_coords = qs.kernel_coords(std::vector<double>(ne, 1.0));
    for (int i = 0; i < n0; ++i) {
      qs.dminus_(i) = 1.0;
      qs.dplus_(i) = 1.0;
    }
    qs.dminus_.tail(r) = -one_coords;
    qs.dplus_.tail(r) = -one_coords;
  } else {
    std::vector<double> sv(ne);
    for (int e = 0; e < ne; ++e) sv[e] = qs.v_of_b_[e] / field.b[e];
    Eigen::VectorXd sv_coords = qs.kernel_coords(sv);
    for (int i = 0; i < n0; ++i) {
      qs.dminus_(i) = kInvSqrt2;
      qs.dplus_(i) = kInvSqrt2;
    }
    for (int i = 0; i < nm; ++i) qs.dminus_(n0 + i) = 1.0;
    for (int i = 0; i < np; ++i) qs.dplus_(n0 + nm + i) = -1.0;
    qs.dminus_.tail(r) = -kInvSqrt2 * sv_coords;
    qs.dplus_.tail(r) = -kInvSqrt2 * sv_coords;
  }
  qs.onb_minus_ = complement_onb(qs.metric_, qs.dminus_);
  qs.onb_plus_ = complement_onb(qs.metric_, qs.dplus_);

  // unprojected raw G rows over the trace coordinates
  auto boundary_slot = [&](int q) {
    const auto& bd = g->boundary();
    for (size_t i = 0; i < bd.size(); ++i)
      if (bd[i] == q) return static_cast<int>(i);
    fail(errc::not_boundary_vertex, g->vertex_id(q));
  };
  const int nt = 2 * ne;
  Eigen::MatrixXd kernel_rows_sum = Eigen::MatrixXd::Zero(r, nt);
  Eigen::MatrixXd kernel_rows_dif = Eigen::MatrixXd::Zero(r, nt);
  if (r > 0) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ne, ne);
    for (int e = 0; e < ne; ++e) M(e, e) = field.nu_weights[e];
    kernel_rows_sum = qs.psi_.transpose() * M * (qs.tc_.W + qs.tc_.Z);
    kernel_rows_dif = qs.psi_.transpose() * M * (qs.tc_.W - qs.tc_.Z);
  }
  qs.g_rows_minus_ = Eigen::MatrixXd::Zero(raw, nt);
  qs.g_rows_plus_ = Eigen::MatrixXd::Zero(raw, nt);
  if (qs.solenoidal_) {
    for (int i = 0; i < n0; ++i) {
      int s = boundary_slot(qs.part_.zero[i]);
      int q = qs.part_.zero[i];
      qs.g_rows_minus_.row(i) = kInvSqrt2 * (qs.tc_.Gv.row(q) + qs.tc_.Nfb.row(s));
      qs.g_rows_plus_.row(i) = kInvSqrt2 * (qs.tc_.Gv.row(q) - qs.tc_.Nfb.row(s));
    }
    qs.g_rows_minus_.bottomRows(r) = kInvSqrt2 * kernel_rows_sum;
    qs.g_rows_plus_.bottomRows(r) = kInvSqrt2 * kernel_rows_dif;
  } else {
    for (int i = 0; i < n0; ++i) {
      int s = boundary_slot(qs.part_.zero[i]);
      int q = qs.part_.zero[i];
      qs.g_rows_minus_.row(i) = kInvSqrt2 * (qs.tc_.Gv.row(q) + qs.tc_.Nfb.row(s));
      qs.g_rows_plus_.row(i) = kInvSqrt2 * (qs.tc_.Gv.row(q) - qs.tc_.Nfb.row(s));
    }
    for (int i = 0; i < nm; ++i) {
      int s = boundary_slot(qs.part_.neg[i]);
      qs.g_rows_minus_.row(n0 + i) = qs.tc_.Dub.row(s) / qs.part_.weight_neg[i];
      qs.g_rows_plus_.row(n0 + i) = qs.tc_.Nfb.row(s) / qs.part_.weight_neg[i];
    }
    for (int i = 0; i < np; ++i) {
      int s = boundary_slot(qs.part_.pos[i]);
      qs.g_rows_minus_.row(n0 + nm + i) = qs.tc_.Nfb.row(s) / qs.part_.weight_pos[i];
      qs.g_rows_plus_.row(n0 + nm + i) = qs.tc_.Dub.row(s) / qs.part_.weight_pos[i];
    }
    qs.g_rows_minus_.bottomRows(r) = kInvSqrt2 * kernel_rows_sum;
    qs.g_rows_plus_.bottomRows(r) = kInvSqrt2 * kernel_rows_dif;
  }
  return qs;
}

double QuadrupleSpaces::raw_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  double s = 0.0;
  for (int i = 0; i < raw_dim(); ++i) s += metric_(i) * x(i) * y(i);
  return s;
}

Eigen::VectorXd QuadrupleSpaces::project(Side s, const Eigen::VectorXd& raw) const {
  const Eigen::VectorXd& d = s == Side::minus ? dminus_ : dplus_;
  double alpha = raw_inner(raw, d) / raw_inner(d, d);
  return raw - alpha * d;
}

Eigen::VectorXd QuadrupleSpaces::onb_coords(Side s, const Eigen::VectorXd& raw) const {
  const Eigen::MatrixXd& Q = onb(s);
  Eigen::VectorXd c(Q.cols());
  for (int j = 0; j < Q.cols(); ++j) c(j) = raw_inner(raw, Q.col(j));
  return c;
}

Eigen::VectorXd QuadrupleSpaces::raw_from_onb(Side s, const Eigen::VectorXd& coords) const {
  return onb(s) * coords;
}

Eigen::VectorXd QuadrupleSpaces::apply_G(Side s, const EdgeFunction& f) const {
  DomainCheck dc = check_domain(f, field_);
  if (!dc.in_domain) fail(errc::not_in_domain, "G maps require a domain element");
  const Eigen::MatrixXd& rows = s == Side::minus ? g_rows_minus_ : g_rows_plus_;
  return project(s, rows * tc_.traces(f));
}

Eigen::VectorXd QuadrupleSpaces::apply_G_onb(Side s, const EdgeFunction& f) const {
  return onb_coords(s, apply_G(s, f));
}

Eigen::VectorXd QuadrupleSpaces::raw_from_data(Side s, const std::vector<double>& g_b,
                                               const std::vector<double>& n_fb, const std::vector<double>& du_b,
                                               const std::vector<double>& w, const std::vector<double>& z) const {
  const auto& bd = graph()->boundary();
  auto slot = [&](int q) {
    for (size_t i = 0; i < bd.size(); ++i)
      if (bd[i] == q) return static_cast<int>(i);
    fail(errc::not_boundary_vertex, graph()->vertex_id(q));
  };
  const int ne = graph()->edge_count();
  std::vector<double> wz(ne);
  double zsign = s == Side::minus ? 1.0 : -1.0;
  for (int e = 0; e < ne; ++e) wz[e] = w[e] + zsign * z[e];
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(raw_dim());
  const int n0 = static_cast<int>(part_.zero.size());
  for (int i = 0; i < n0; ++i) {
    int sl = slot(part_.zero[i]);
    raw(i) = kInvSqrt2 * (g_b[sl] + zsign * n_fb[sl]);
  }
  if (!solenoidal_) {
    const int nm = static_cast<int>(part_.neg.size());
    for (int i = 0; i < nm; ++i) {
      int sl = slot(part_.neg[i]);
      raw(n0 + i) = (s == Side::minus ? du_b[sl] : n_fb[sl]) / part_.weight_neg[i];
    }
    for (size_t i = 0; i < part_.pos.size(); ++i) {
      int sl = slot(part_.pos[i]);
      raw(n0 + nm + static_cast<int>(i)) = (s == Side::minus ? n_fb[sl] : du_b[sl]) / part_.weight_pos[i];
    }
  }
  raw.tail(kernel_rank()) = kInvSqrt2 * kernel_coords(wz);
  return raw;
}

Eigen::VectorXd QuadrupleSpaces::apply_G_from_decomposition(Side s, const KeyDecomposition& kd) const {
  return project(s, raw_from_data(s, kd.g_b, kd.n_fb, kd.du_b, kd.w, kd.z));
}

double QuadrupleSpaces::identity_check(const EdgeFunction& f1, const EdgeFunction& f2) const {
  EdgeFunction d1 = apply_dbot(f1, field_);
  EdgeFunction d2 = apply_dbot(f2, field_);
  double lhs = -(l2nu_inner(d1, f2, field_) + l2nu_inner(f1, d2, field_));
  Eigen::VectorXd gm1 = apply_G(Side::minus, f1), gm2 = apply_G(Side::minus, f2);
  Eigen::VectorXd gp1 = apply_G(Side::plus, f1), gp2 = apply_G(Side::plus, f2);
  double rhs = raw_inner(gp1, gp2) - raw_inner(gm1, gm2);
  return std::abs(lhs - rhs);
}

Eigen::VectorXd QuadrupleSpaces::kernel_coords(const std::vector<double>& edge_constants) const {
  const int ne = graph()->edge_count();
  Eigen::VectorXd c(kernel_rank());
  for (int j = 0; j < kernel_rank(); ++j) {
    double s = 0.0;
    for (int e = 0; e < ne; ++e) s += field_.nu_weights[e] * edge_constants[e] * psi_(e, j);
    c(j) = s;
  }
  return c;
}

std::vector<double> QuadrupleSpaces::kernel_to_edge_constants(const Eigen::VectorXd& coords) const {
  const int ne = graph()->edge_count();
  std::vector<double> out(ne, 0.0);
  for (int j = 0; j < kernel_rank(); ++j)
    for (int e = 0; e < ne; ++e) out[e] += coords(j) * psi_(e, j);
  return out;
}

EdgeFunction QuadrupleSpaces::construct_preimage(const Eigen::VectorXd& f_minus_raw,
                                                 const Eigen::VectorXd& f_plus_raw) const {
  if (f_minus_raw.size() != raw_dim() || f_plus_raw.size() != raw_dim())
    fail(errc::dimension_mismatch, "boundary vectors must carry raw H~pm coordinates");
  const auto& g = graph();
  const int ne = g->edge_count();
  const int r = kernel_rank();
  const int n0 = static_cast<int>(part_.zero.size());
  const int nm = static_cast<int>(part_.neg.size());

  std::vector<double> wz_m = kernel_to_edge_constants(f_minus_raw.tail(r));
  std::vector<double> wz_p = kernel_to_edge_constants(f_plus_raw.tail(r));
  double kernel_dif_mass = 0.0;  // < F-perp - F+perp , 1 >_{L2(nu_b)}
  for (int e = 0; e < ne; ++e) kernel_dif_mass += field_.nu_weights[e] * (wz_m[e] - wz_p[e]);

  double c;
  std::vector<double> z(ne), w(ne), eta(g->boundary().size(), 0.0);
  std::map<std::string, double> g_values;
  auto slot = [&](int q) {
    const auto& bd = g->boundary();
    for (size_t i = 0; i < bd.size(); ++i)
      if (bd[i] == q) return static_cast<int>(i);
    fail(errc::not_boundary_vertex, g->vertex_id(q));
  };

  if (solenoidal_) {
    double sum_dif = 0.0;
    for (int i = 0; i < n0; ++i) sum_dif += f_minus_raw(i) - f_plus_raw(i);
    c = kInvSqrt2 * (kernel_dif_mass - sum_dif) / (n0 + field_.total_mass());
    for (int e = 0; e < ne; ++e) {
      w[e] = kInvSqrt2 * (wz_p[e] + wz_m[e]);
      z[e] = kInvSqrt2 * (wz_m[e] - wz_p[e]) - c;
    }
    for (int i = 0; i < n0; ++i) {
      int sl = slot(part_.zero[i]);
      eta[sl] = kInvSqrt2 * (f_minus_raw(i) - f_plus_raw(i)) + c;
      g_values[g->vertex_id(part_.zero[i])] = kInvSqrt2 * (f_minus_raw(i) + f_plus_raw(i));
    }
  } else {
    std::vector<double> sv(ne);
    for (int e = 0; e < ne; ++e) sv[e] = v_of_b_[e] / field_.b[e];
    double v_h_norm2 = 0.0;
    for (int e = 0; e < ne; ++e) v_h_norm2 += g->edge(e).conductance * v_of_b_[e] * v_of_b_[e];
    double nb_total = 0.0;
    for (double wgt : part_.weight_neg) nb_total += wgt;
    for (double wgt : part_.weight_pos) nb_total += wgt;

    double rhs_c = 0.0;
    for (int i = 0; i < n0; ++i) rhs_c -= kInvSqrt2 * (f_minus_raw(i) - f_plus_raw(i));
    for (int i = 0; i < nm; ++i) rhs_c += f_minus_raw(n0 + i) * (-part_.weight_neg[i]);
    for (size_t i = 0; i < part_.pos.size(); ++i)
      rhs_c -= f_plus_raw(n0 + nm + static_cast<int>(i)) * part_.weight_pos[i];
    rhs_c += kInvSqrt2 * kernel_dif_mass;
    c = rhs_c / (n0 + nb_total + v_h_norm2);

    for (int e = 0; e < ne; ++e) {
      w[e] = kInvSqrt2 * (wz_p[e] + wz_m[e]);
      z[e] = kInvSqrt2 * (wz_m[e] - wz_p[e]) - c * sv[e];
    }
    for (int i = 0; i < n0; ++i) {
      int sl = slot(part_.zero[i]);
      eta[sl] = kInvSqrt2 * (f_minus_raw(i) - f_plus_raw(i)) + c;
      g_values[g->vertex_id(part_.zero[i])] = kInvSqrt2 * (f_minus_raw(i) + f_plus_raw(i));
    }
    for (int i = 0; i < nm; ++i) {
      int sl = slot(part_.neg[i]);
      double nb = -part_.weight_neg[i];
      eta[sl] = -f_minus_raw(n0 + i) * nb - c * nb;
      g_values[g->vertex_id(part_.neg[i])] = f_minus_raw(n0 + i) - f_plus_raw(n0 + i) + c;
    }
    for (size_t i = 0; i < part_.pos.size(); ++i) {
      int idx = n0 + nm + static_cast<int>(i);
      int sl = slot(part_.pos[i]);
      double nb = part_.weight_pos[i];
      eta[sl] = f_plus_raw(idx) * nb + c * nb;
      g_values[g->vertex_id(part_.pos[i])] = f_minus_raw(idx) - f_plus_raw(idx) - c;
    }
  }

  ContinuousFunction u = solve_neumann_constants(field_, z, eta);
  EdgeFunction f = star_inv(field_, u.edge_function().derivative());
  f += EdgeFunction::edge_constants(g, w);
  if (!g->boundary().empty()) {
    ContinuousFunction gi = harmonic_extend(g, g_values);
    f += gi.edge_function();
  }
  return f;
}

QuadrupleSpaces::ContractionCheck QuadrupleSpaces::check_contraction(const Eigen::MatrixXd& theta_onb) const {
  if (theta_onb.rows() != dim_hplus() || theta_onb.cols() != dim_hminus())
    fail(errc::dimension_mismatch, "Theta must map H- (dim " + std::to_string(dim_hminus()) + ") to H+ (dim " +
                                        std::to_string(dim_hplus()) + ")");
  ContractionCheck out;
  if (theta_onb.size() == 0) {
    out.contraction = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta_onb);
  out.sigma_max = svd.singularValues()(0);
  out.contraction = out.sigma_max <= 1.0 + tol::contraction;
  return out;
}

Eigen::MatrixXd QuadrupleSpaces::g_rows_onb(Side s) const {
  const Eigen::MatrixXd& rows = s == Side::minus ? g_rows_minus_ : g_rows_plus_;
  const Eigen::MatrixXd& Q = onb(s);
  Eigen::MatrixXd weighted = rows;
  for (int i = 0; i < raw_dim(); ++i) weighted.row(i) *= metric_(i);
  return Q.transpose() * weighted;
}

nlohmann::ordered_json QuadrupleSpaces::boundary_vector_to_json(const Eigen::VectorXd& raw) const {
  nlohmann::ordered_json j;
  const auto& g = graph();
  auto block = [&](const std::vector<int>& verts, int off) {
    nlohmann::ordered_json o;
    for (size_t i = 0; i < verts.size(); ++i) o[g->vertex_id(verts[i])] = raw(off + static_cast<int>(i));
    return o;
  };
  j["zero"] = block(part_.zero, offset_zero());
  if (!solenoidal_) {
    j["negative"] = block(part_.neg, offset_neg());
    j["positive"] = block(part_.pos, offset_pos());
  }
  std::vector<double> kc(raw.data() + offset_kernel(), raw.data() + raw_dim());
  j["kernel"] = kc;
  return j;
}

nlohmann::ordered_json QuadrupleSpaces::describe() const {
  nlohmann::ordered_json j;
  j["solenoidal"] = solenoidal_;
  j["dim_hminus"] = dim_hminus();
  j["dim_hplus"] = dim_hplus();
  j["kernel_rank"] = kernel_rank();
  const auto& g = graph();
  auto names = [&](const std::vector<int>& verts) {
    std::vector<std::string> out;
    for (int v : verts) out.push_back(g->vertex_id(v));
    return out;
  };
  j["boundary_zero"] = names(part_.zero);
  j["boundary_negative"] = names(part_.neg);
  j["boundary_positive"] = names(part_.pos);
  j["balance_defect"] = part_.balance_defect;
  return j;
}

Eigen::MatrixXd theta_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(errc::bad_document, "empty Theta document");
  int rows = 0, cols = 0;
  if (std::sscanf(line.c_str(), "%d,%d", &rows, &cols) != 2 || rows < 0 || cols < 0)
    fail(errc::bad_document, "Theta header must be 'rows,cols'");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) fail(errc::bad_document, "Theta row count mismatch");
    std::istringstream ls(line);
    std::string cell;
    for (int j = 0; j < cols; ++j) {
      if (!std::getline(ls, cell, ',')) fail(errc::bad_document, "Theta column count mismatch");
      m(i, j) = std::stod(cell);
    }
  }
  return m;
}

std::string theta_to_csv(const Eigen::MatrixXd& theta) {
  std::string out = std::to_string(theta.rows()) + "," + std::to_string(theta.cols()) + "\n";
  for (int i = 0; i < theta.rows(); ++i) {
    for (int j = 0; j < theta.cols(); ++j) {
      out += report::num(theta(i, j));
      out += j + 1 < theta.cols() ? ',' : '\n';
    }
  }
  return out;
}

}  // namespace mgt
