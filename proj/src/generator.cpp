#include "mgt/generator.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "mgt/poly.hpp"
#include "mgt/report.hpp"
#include "evolve_detail.hpp"

namespace mgt {

namespace {

// trace expansion of edge-constant functions: T(c)_[2e] = T(c)_[2e+1] = c_e
Eigen::MatrixXd edge_constant_traces(int ne) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2 * ne, ne);
  for (int e = 0; e < ne; ++e) {
    T(2 * e, e) = 1.0;
    T(2 * e + 1, e) = 1.0;
  }
  return T;
}

void require_contraction(const QuadrupleSpaces& qs, const Contraction& th) {
  auto chk = qs.check_contraction(th.theta);
  if (!chk.contraction)
    fail(errc::not_contraction, "sigma_max = " + std::to_string(chk.sigma_max));
}

}  // namespace

Contraction theta_zero(const QuadrupleSpaces& qs) {
  return {Eigen::MatrixXd::Zero(qs.dim_hplus(), qs.dim_hminus()), "zero", false};
}

Contraction theta_scalar(const QuadrupleSpaces& qs, double value) {
  Contraction th;
  th.theta = value * Eigen::MatrixXd::Identity(qs.dim_hplus(), qs.dim_hminus());
  th.tag = "scalar";
  th.peradjoint_catalog = qs.solenoidal() && value == 1.0;
  return th;
}

Contraction theta_identity(const QuadrupleSpaces& qs) {
  if (!qs.solenoidal())
    fail(errc::not_in_catalog, "identity contraction needs the solenoidal quadruple (H- = H+)");
  Contraction th = theta_scalar(qs, 1.0);
  th.tag = "identity";
  th.peradjoint_catalog = true;
  return th;
}

Contraction theta_from_raw_blocks(const QuadrupleSpaces& qs, const Eigen::MatrixXd& boundary_block,
                                  const std::string& tag) {
  const int nb = qs.raw_dim() - qs.kernel_rank();
  const int r = qs.kernel_rank();
  if (boundary_block.rows() != nb || boundary_block.cols() != nb)
    fail(errc::dimension_mismatch, "boundary block must be " + std::to_string(nb) + " square");
  Eigen::MatrixXd theta(qs.dim_hplus(), qs.dim_hminus());
  for (int j = 0; j < qs.dim_hminus(); ++j) {
    Eigen::VectorXd x = qs.onb(Side::minus).col(j);
    Eigen::VectorXd tx(qs.raw_dim());
    tx.head(nb) = boundary_block * x.head(nb);
    tx.tail(r) = x.tail(r);
    theta.col(j) = qs.onb_coords(Side::plus, tx);
  }
  return {std::move(theta), tag, false};
}

Contraction theta_tree_periodic(const QuadrupleSpaces& qs) {
  const auto& p = qs.partition();
  if (!p.zero.empty() || p.neg.size() != 1 || p.pos.empty())
    fail(errc::not_in_catalog, "periodic contraction needs one inflow vertex and outflow leaves");
  const int nb = 1 + static_cast<int>(p.pos.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nb, nb);
  for (size_t i = 0; i < p.pos.size(); ++i) B(0, 1 + static_cast<int>(i)) = -p.weight_pos[i] / p.weight_neg[0];
  Contraction th = theta_from_raw_blocks(qs, B, "tree-periodic");
  // per-adjoint case needs equal outflow weights summing to the inflow weight
  bool equal = true;
  for (double w : p.weight_pos)
    if (std::abs(w - p.weight_pos[0]) > 1e-12 * p.weight_pos[0]) equal = false;
  th.peradjoint_catalog = equal;
  return th;
}

Contraction theta_sg_normal_periodic(const QuadrupleSpaces& qs) {
  Contraction th = theta_tree_periodic(qs);
  th.tag = "sg-normal-periodic";
  return th;
}

Contraction theta_sg_degenerate_periodic(const QuadrupleSpaces& qs) {
  const auto& p = qs.partition();
  if (p.zero.size() != 1 || p.neg.size() != 1 || p.pos.size() != 1)
    fail(errc::not_in_catalog, "degenerate periodic contraction needs boundary pattern (0,-,+)");
  if (std::abs(p.weight_neg[0] - p.weight_pos[0]) > 1e-12 * p.weight_pos[0])
    fail(errc::not_in_catalog, "inflow and outflow weights must agree");
  Eigen::MatrixXd B(3, 3);
  B << 1, 0, 0, 0, 0, -1, 0, -1, 0;
  Contraction th = theta_from_raw_blocks(qs, B, "sg-degenerate-periodic");
  th.peradjoint_catalog = true;
  return th;
}

Contraction theta_from_matrix(const QuadrupleSpaces& qs, const Eigen::MatrixXd& m, const std::string& tag) {
  if (m.rows() != qs.dim_hplus() || m.cols() != qs.dim_hminus())
    fail(errc::dimension_mismatch, "Theta must be " + std::to_string(qs.dim_hplus()) + " x " +
                                       std::to_string(qs.dim_hminus()));
  return {m, tag, false};
}

double theta_from_theta_bar(double c, double theta_bar) {
  double ci = 1.0 / c;
  double num = ci * (1.0 - theta_bar) - 0.5 * (theta_bar + 1.0);
  double den = ci * (theta_bar - 1.0) - 0.5 * (theta_bar + 1.0);
  return num / den;
}

DomainResidual in_domain_theta(const QuadrupleSpaces& qs, const Contraction& th, const EdgeFunction& f) {
  Eigen::VectorXd gm = qs.apply_G_onb(Side::minus, f);
  Eigen::VectorXd gp = qs.apply_G_onb(Side::plus, f);
  DomainResidual out;
  out.residual = (th.theta * gm - gp).norm();
  double scale = std::max({1.0, gm.norm(), gp.norm()});
  out.in_domain = out.residual <= tol::theta_domain * scale;
  return out;
}

// ---------------------------------------------------------------------------
// resolvent

namespace {

// phi0 = int_0^D e^{-m tau} dtau, phi1 = int_0^D tau e^{-m tau} dtau, m > 0
void decay_weights(double m, double D, double& phi0, double& phi1) {
  double x = m * D;
  if (x < 1e-4) {
    phi0 = D * (1.0 - x / 2.0 + x * x / 6.0);
    phi1 = D * D * (0.5 - x / 3.0 + x * x / 8.0);
    return;
  }
  double E = std::exp(-x);
  phi0 = -std::expm1(-x) / m;
  phi1 = (-std::expm1(-x) - x * E) / (m * m);
}

// moments m_k = int_0^L tau^k e^{-mu tau} dtau for mu >= 0, stable through a
// series branch when the recurrence would cancel
std::vector<double> decay_moments(double mu, double L, int kmax) {
  std::vector<double> m(kmax + 1);
  double x = mu * L;
  if (x < 0.5) {
    // m_k = L^{k+1} sum_j (-x)^j / (j! (k+j+1))
    for (int k = 0; k <= kmax; ++k) {
      double term = 1.0, sum = 1.0 / (k + 1);
      for (int j = 1; j <= 30; ++j) {
        term *= -x / j;
        sum += term / (k + j + 1.0);
        if (std::abs(term) < 1e-20) break;
      }
      m[k] = std::pow(L, k + 1) * sum;
    }
    return m;
  }
  double E = std::exp(-x);
  m[0] = -std::expm1(-x) / mu;
  double Lk = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    Lk *= L;
    m[k] = (k * m[k - 1] - Lk * E) / mu;
  }
  return m;
}

// shifted coefficients of p(base - tau) as a polynomial in tau
std::vector<double> shift_reflect(const std::vector<double>& p, double base) {
  // d_k = (-1)^k p^{(k)}(base) / k!
  std::vector<double> d(p.size(), 0.0);
  std::vector<double> deriv = p;
  double fact = 1.0;
  for (size_t k = 0; k < p.size(); ++k) {
    if (k > 0) {
      deriv = poly::derivative(deriv);
      fact *= k;
    }
    d[k] = (k % 2 == 0 ? 1.0 : -1.0) * poly::eval(deriv, base) / fact;
  }
  return d;
}

constexpr double kSplitMu = 20.0;  // above this the polynomial tail recurrence is stable

}  // namespace

namespace {

// particular solution b int_{x0}^{x} e^{-mu(x-s)} rhs(s) ds through stable
// decay moments; valid for either flow direction
double particular_value(double bcoef, double mu, double x0, const std::vector<double>& rhs, double x) {
  if (x0 == 0.0) {
    auto d = shift_reflect(rhs, x);
    auto m = decay_moments(mu, x, static_cast<int>(rhs.size()) - 1);
    double s = 0.0;
    for (size_t k = 0; k < d.size(); ++k) s += d[k] * m[k];
    return bcoef * s;
  }
  // x0 = 1, mu < 0: -b int_0^{1-x} e^{-(-mu) tau} rhs(x + tau) dtau
  std::vector<double> deriv = rhs;
  std::vector<double> ecoef(rhs.size());
  double fact = 1.0;
  for (size_t k = 0; k < rhs.size(); ++k) {
    if (k > 0) {
      deriv = poly::derivative(deriv);
      fact *= k;
    }
    ecoef[k] = poly::eval(deriv, x) / fact;
  }
  auto m = decay_moments(-mu, 1.0 - x, static_cast<int>(rhs.size()) - 1);
  double s = 0.0;
  for (size_t k = 0; k < ecoef.size(); ++k) s += ecoef[k] * m[k];
  return -bcoef * s;
}

const std::vector<std::pair<double, double>>& gauss64() {
  static std::vector<std::pair<double, double>> pts = [] {
    std::vector<std::pair<double, double>> out;
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double p0 = 1.0, p1 = x, dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      out.emplace_back(0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp));
    }
    return out;
  }();
  return pts;
}

}  // namespace

double ResolventSolution::value(int e, double x) const {
  if (!closed_form) fail(errc::representation_mismatch, "no closed form available");
  double hom = amp[e] * std::exp(-mu[e] * (x - anchor[e]));
  if (split[e]) return hom + poly::eval(tail[e], x);
  return hom + particular_value(bcoef[e], mu[e], anchor[e], rhs_poly[e], x);
}

double ResolventSolution::exact_l2nu_norm(const VelocityField& b) const {
  if (!closed_form) return l2nu_norm(f, b);
  double s = 0.0;
  for (int e = 0; e < f.graph()->edge_count(); ++e) {
    double part = 0.0;
    if (split[e]) {
      // moments J_k(m) = int_0^1 x^k e^{-m(x-x0)} dx, recurrence is stable at
      // the magnitudes where the split is used
      auto moments = [&](double m, int kmax) {
        std::vector<double> J(kmax + 1);
        double E0 = std::exp(-m * (0.0 - anchor[e]));
        double E1 = std::exp(-m * (1.0 - anchor[e]));
        J[0] = (E0 - E1) / m;
        for (int k = 1; k <= kmax; ++k) J[k] = (-E1 + k * J[k - 1]) / m;
        return J;
      };
      const auto& q = tail[e];
      int deg = static_cast<int>(q.size()) - 1;
      part = poly::inner01(q, q);
      auto J1 = moments(mu[e], deg);
      for (int k = 0; k <= deg; ++k) part += 2.0 * amp[e] * q[k] * J1[k];
      auto J2 = moments(2.0 * mu[e], 0);
      part += amp[e] * amp[e] * J2[0];
    } else {
      // |mu| is moderate, Gauss quadrature of the analytic integrand is exact
      // to double precision
      for (auto [x, w] : gauss64()) {
        double v = value(e, x);
        part += w * v * v;
      }
    }
    s += b.nu_weights[e] * part;
  }
  return std::sqrt(std::max(0.0, s));
}

ResolventSolution resolvent_solve(const QuadrupleSpaces& qs, const Contraction& th, double lambda,
                                  const EdgeFunction& rhs, int n_out) {
  if (!(lambda > 0.0)) fail(errc::usage, "resolvent needs lambda > 0");
  require_contraction(qs, th);
  const auto& b = qs.field();
  const auto& g = qs.graph();
  if (rhs.graph().get() != g.get()) fail(errc::graph_mismatch, "rhs lives on a different graph");
  const int ne = g->edge_count();

  ResolventSolution sol;
  sol.closed_form = rhs.rep() == Rep::poly;
  sol.mu.resize(ne);
  sol.anchor.resize(ne);
  sol.amp.assign(ne, 0.0);
  sol.split.assign(ne, 0);
  sol.tail.resize(ne);
  sol.rhs_poly.resize(ne);
  sol.bcoef = b.b;

  // homogeneous and particular traces per edge
  std::vector<double> h0(ne), h1(ne), p0(ne), p1(ne);
  std::vector<std::vector<double>> part_nodal(ne);
  for (int e = 0; e < ne; ++e) {
    double mu = lambda * b.b[e];
    double x0 = b.b[e] > 0 ? 0.0 : 1.0;
    sol.mu[e] = mu;
    sol.anchor[e] = x0;
    h0[e] = std::exp(-mu * (0.0 - x0));
    h1[e] = std::exp(-mu * (1.0 - x0));
    if (sol.closed_form) {
      const auto& p = rhs.edge_data(e);
      sol.rhs_poly[e] = p;
      if (std::abs(mu) >= kSplitMu) {
        sol.split[e] = 1;
        std::vector<double> q(p.size());
        for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) {
          double next = (k + 1 < static_cast<int>(q.size())) ? (k + 1) * q[k + 1] : 0.0;
          q[k] = (b.b[e] * p[k] - next) / mu;
        }
        double qa = poly::eval(q, x0);
        sol.tail[e] = q;
        sol.amp[e] = -qa;  // particular part q(x) - q(x0) e^{-mu(x-x0)}
        p0[e] = poly::eval(q, 0.0) - qa * h0[e];
        p1[e] = poly::eval(q, 1.0) - qa * h1[e];
      } else {
        p0[e] = particular_value(b.b[e], mu, x0, p, 0.0);
        p1[e] = particular_value(b.b[e], mu, x0, p, 1.0);
      }
    } else {
      const auto& rv = rhs.edge_data(e);
      int n = static_cast<int>(rv.size()) - 1;
      double D = 1.0 / n;
      std::vector<double> K(n + 1, 0.0);
      if (b.b[e] > 0) {
        double phi0, phi1, E = std::exp(-mu * D);
        decay_weights(mu, D, phi0, phi1);
        for (int j = 0; j < n; ++j)
          K[j + 1] = E * K[j] + b.b[e] * (rv[j + 1] * phi0 + (rv[j] - rv[j + 1]) * phi1 / D);
      } else {
        double nu = -mu;
        double phi0, phi1, E = std::exp(-nu * D);
        decay_weights(nu, D, phi0, phi1);
        for (int j = n - 1; j >= 0; --j)
          K[j] = E * K[j + 1] - b.b[e] * (rv[j] * phi0 + (rv[j + 1] - rv[j]) * phi1 / D);
      }
      p0[e] = K.front();
      p1[e] = K.back();
      part_nodal[e] = std::move(K);
    }
  }

  // rows: interior weighted Kirchhoff + Theta-coupling, all on traces
  Eigen::MatrixXd Thom = Eigen::MatrixXd::Zero(2 * ne, ne);
  Eigen::VectorXd Tpart(2 * ne);
  for (int e = 0; e < ne; ++e) {
    Thom(2 * e, e) = h0[e];
    Thom(2 * e + 1, e) = h1[e];
    Tpart(2 * e) = p0[e];
    Tpart(2 * e + 1) = p1[e];
  }
  const int rows_theta = qs.dim_hplus();
  const int rows_kir = g->interior_count();
  if (rows_kir + rows_theta != ne)
    fail(errc::singular_system, "constraint count " + std::to_string(rows_kir + rows_theta) +
                                    " does not match edge count " + std::to_string(ne));
  Eigen::MatrixXd C(ne, 2 * ne);
  C.topRows(rows_kir) = qs.calculus().Kir;
  C.bottomRows(rows_theta) = th.theta * qs.g_rows_onb(Side::minus) - qs.g_rows_onb(Side::plus);
  Eigen::MatrixXd A = C * Thom;
  Eigen::VectorXd rhsv = -(C * Tpart);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) fail(errc::singular_system, "resolvent coupling matrix is singular");
  Eigen::VectorXd a = lu.solve(rhsv);

  // assemble nodal output
  std::vector<std::vector<double>> nodal(ne);
  for (int e = 0; e < ne; ++e) {
    int n = sol.closed_form ? n_out : static_cast<int>(part_nodal[e].size()) - 1;
    std::vector<double> v(n + 1);
    if (sol.closed_form) {
      sol.amp[e] += a(e);
      for (int j = 0; j <= n; ++j) v[j] = sol.value(e, double(j) / n);
    } else {
      for (int j = 0; j <= n; ++j) {
        double x = double(j) / n;
        v[j] = a(e) * std::exp(-sol.mu[e] * (x - sol.anchor[e])) + part_nodal[e][j];
      }
      sol.amp[e] = a(e);
    }
    nodal[e] = std::move(v);
  }
  sol.f = EdgeFunction::sampled(g, std::move(nodal));
  return sol;
}

// ---------------------------------------------------------------------------
// Crank-Nicolson evolution

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct CnSystem {
  int ne = 0, n = 0, nfull = 0, nred = 0;
  std::vector<int> edge_offset;
  SpMat Z;       // reduced -> full
  SpMat M;       // nu_b mass matrix
  SpMat A_plus;  // Z^T (M + dt/2 K) Z
  Eigen::SparseLU<SpMat> lu;  // of Z^T (M - dt/2 K) Z
  Eigen::MatrixXd NT;         // trace null basis
};

void build_cn_system(CnSystem& s, const QuadrupleSpaces& qs, const Contraction& th, int n, double dt) {
  const auto& g = qs.graph();
  const auto& b = qs.field();
  s.ne = g->edge_count();
  s.n = n;
  s.nfull = s.ne * (n + 1);
  s.edge_offset.resize(s.ne);
  for (int e = 0; e < s.ne; ++e) s.edge_offset[e] = e * (n + 1);

  std::vector<Eigen::Triplet<double>> mt, kt;
  double dx = 1.0 / n;
  for (int e = 0; e < s.ne; ++e) {
    double wm = b.nu_weights[e] * dx / 6.0;
    double kappa = -g->edge(e).conductance * b.b[e] / 2.0;
    for (int j = 0; j < n; ++j) {
      int i0 = s.edge_offset[e] + j, i1 = i0 + 1;
      mt.emplace_back(i0, i0, 2 * wm);
      mt.emplace_back(i0, i1, wm);
      mt.emplace_back(i1, i0, wm);
      mt.emplace_back(i1, i1, 2 * wm);
      // int_cell f' psi_i: rows j and j+1 both get kappa (f_{j+1} - f_j)
      kt.emplace_back(i0, i0, -kappa);
      kt.emplace_back(i0, i1, kappa);
      kt.emplace_back(i1, i0, -kappa);
      kt.emplace_back(i1, i1, kappa);
    }
  }
  s.M.resize(s.nfull, s.nfull);
  s.M.setFromTriplets(mt.begin(), mt.end());
  SpMat K(s.nfull, s.nfull);
  K.setFromTriplets(kt.begin(), kt.end());

  // trace constraints: interior Kirchhoff and Theta-coupling
  Eigen::MatrixXd C(g->interior_count() + qs.dim_hplus(), 2 * s.ne);
  C.topRows(g->interior_count()) = qs.calculus().Kir;
  C.bottomRows(qs.dim_hplus()) = th.theta * qs.g_rows_onb(Side::minus) - qs.g_rows_onb(Side::plus);
  Eigen::FullPivLU<Eigen::MatrixXd> clu(C);
  clu.setThreshold(1e-10);
  s.NT = clu.kernel();
  const int ntr = static_cast<int>(s.NT.cols());

  s.nred = s.ne * (n - 1) + ntr;
  std::vector<Eigen::Triplet<double>> zt;
  for (int e = 0; e < s.ne; ++e)
    for (int j = 1; j < n; ++j) zt.emplace_back(s.edge_offset[e] + j, e * (n - 1) + (j - 1), 1.0);
  for (int c = 0; c < ntr; ++c)
    for (int e = 0; e < s.ne; ++e) {
      if (s.NT(2 * e, c) != 0.0) zt.emplace_back(s.edge_offset[e], s.ne * (n - 1) + c, s.NT(2 * e, c));
      if (s.NT(2 * e + 1, c) != 0.0)
        zt.emplace_back(s.edge_offset[e] + n, s.ne * (n - 1) + c, s.NT(2 * e + 1, c));
    }
  s.Z.resize(s.nfull, s.nred);
  s.Z.setFromTriplets(zt.begin(), zt.end());

  SpMat Mm = s.M - (dt / 2.0) * K;
  SpMat Mp = s.M + (dt / 2.0) * K;
  SpMat A_minus = SpMat(s.Z.transpose()) * Mm * s.Z;
  s.A_plus = SpMat(s.Z.transpose()) * Mp * s.Z;
  A_minus.makeCompressed();
  s.lu.compute(A_minus);
  if (s.lu.info() != Eigen::Success) fail(errc::singular_system, "CN step matrix factorization failed");
}

}  // namespace

Trajectory evolve_cn(const QuadrupleSpaces& qs, const Contraction& th, const EdgeFunction& v0_in, double dt,
                     double t_end, const EvolveOptions& opts) {
  require_contraction(qs, th);
  if (!(dt > 0.0) || !(t_end >= 0.0)) fail(errc::usage, "need dt > 0 and t_end >= 0");
  const auto& g = qs.graph();
  EdgeFunction v0 = v0_in.rep() == Rep::sampled ? v0_in : v0_in.to_sampled(kDefaultSamples);
  DomainResidual dom = in_domain_theta(qs, th, v0);
  if (!dom.in_domain)
    fail(errc::not_in_domain, "initial state violates Theta G- = G+ by " + std::to_string(dom.residual));

  const int n = v0.sample_cells();
  CnSystem sys;
  build_cn_system(sys, qs, th, n, dt);

  // initial reduced coordinates; traces are least-squares projected onto the
  // constraint null space (the defect is bounded by the domain residual)
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.nred);
  Eigen::VectorXd tr(2 * sys.ne);
  for (int e = 0; e < sys.ne; ++e) {
    const auto& d = v0.edge_data(e);
    for (int j = 1; j < n; ++j) y(e * (n - 1) + (j - 1)) = d[j];
    tr(2 * e) = d.front();
    tr(2 * e + 1) = d.back();
  }
  y.tail(sys.NT.cols()) = sys.NT.colPivHouseholderQr().solve(tr);

  int steps = static_cast<int>(std::llround(t_end / dt));
  if (steps < 0 || steps > opts.max_steps) fail(errc::usage, "step count out of range");

  Trajectory traj;
  traj.graph = g;
  traj.probe_value.resize(opts.probes.size());
  traj.probe_flux.resize(opts.probes.size());
  detail::DiagTools tools = detail::DiagTools::build(qs.field(), n, opts.probes);

  std::vector<std::vector<double>> state(sys.ne, std::vector<double>(n + 1));
  auto unpack = [&](const Eigen::VectorXd& yy) {
    Eigen::VectorXd full = sys.Z * yy;
    for (int e = 0; e < sys.ne; ++e)
      for (int j = 0; j <= n; ++j) state[e][j] = full(sys.edge_offset[e] + j);
  };
  auto snapshot = [&](double t) {
    traj.snapshots.emplace_back(t, EdgeFunction::sampled(g, state));
  };

  unpack(y);
  tools.record(traj, 0.0, state);
  snapshot(0.0);
  for (int k = 1; k <= steps; ++k) {
    Eigen::VectorXd rhs = sys.A_plus * y;
    y = sys.lu.solve(rhs);
    unpack(y);
    double t = k * dt;
    tools.record(traj, t, state);
    if ((opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0 && k != steps) || k == steps) snapshot(t);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// checks

double mass_balance_check(const Trajectory& traj) {
  double worst = 0.0, acc = 0.0;
  for (size_t k = 0; k < traj.times.size(); ++k) {
    if (k > 0) {
      double dt = traj.times[k] - traj.times[k - 1];
      double fk = 0.0, fk1 = 0.0;
      for (double v : traj.boundary_flux[k]) fk += v;
      for (double v : traj.boundary_flux[k - 1]) fk1 += v;
      acc += 0.5 * dt * (fk + fk1);
    }
    worst = std::max(worst, std::abs(traj.mass[k] - traj.mass[0] + acc));
  }
  return worst;
}

double weak_solution_check(const Trajectory& traj, int probe, const std::function<double(double)>& psi,
                           const std::function<double(double)>& dpsi) {
  const auto& a = traj.probe_value.at(probe);
  const auto& m = traj.probe_flux.at(probe);
  double lhs = 0.0, rhs_int = 0.0;
  for (size_t k = 0; k + 1 < traj.times.size(); ++k) {
    double dt = traj.times[k + 1] - traj.times[k];
    lhs -= 0.5 * dt * (dpsi(traj.times[k]) * a[k] + dpsi(traj.times[k + 1]) * a[k + 1]);
    rhs_int += 0.5 * dt * (psi(traj.times[k]) * m[k] + psi(traj.times[k + 1]) * m[k + 1]);
  }
  double rhs = rhs_int + psi(traj.times.front()) * a.front();
  return std::abs(lhs - rhs);
}

double duality_check(const Trajectory& traj, const EdgeFunction& w0, const VelocityField& b,
                     double initial_tolerance) {
  if (traj.snapshots.size() != traj.times.size())
    fail(errc::usage, "duality check needs snapshots at every step (snapshot_stride = 1)");
  const EdgeFunction& u0 = traj.snapshots.front().second;
  EdgeFunction w0s = w0.rep() == Rep::sampled && w0.sample_cells() == u0.sample_cells()
                         ? w0
                         : w0.to_sampled(u0.sample_cells());
  EdgeFunction d0 = apply_dbot_unchecked(w0s, b);
  EdgeFunction mismatch = d0 + u0;
  double scale = std::max(1.0, l2nu_norm(u0, b));
  if (l2nu_norm(mismatch, b) > initial_tolerance * scale)
    fail(errc::initial_mismatch, "dbot w0 must equal -u(0), defect " + std::to_string(l2nu_norm(mismatch, b)));

  EdgeFunction w = w0s;
  EdgeFunction dw = apply_dbot_unchecked(w, b);
  EdgeFunction acc = EdgeFunction::constant(b.graph, 0.0, Rep::sampled, u0.sample_cells());
  double worst = 0.0;
  for (size_t k = 1; k < traj.snapshots.size(); ++k) {
    double dt = traj.snapshots[k].first - traj.snapshots[k - 1].first;
    EdgeFunction mid = traj.snapshots[k - 1].second + traj.snapshots[k].second;
    mid *= 0.5 * dt;
    w += mid;
    EdgeFunction dw_new = apply_dbot_unchecked(w, b);
    EdgeFunction dmid = dw + dw_new;
    dmid *= 0.5 * dt;
    acc += dmid;
    dw = dw_new;
    EdgeFunction res = w - w0s + acc;
    worst = std::max(worst, l2nu_norm(res, b));
  }
  return worst;
}

std::vector<std::vector<double>> kernel_basis_constants(const QuadrupleSpaces& qs, const Contraction& th) {
  const auto& g = qs.graph();
  const int ne = g->edge_count();
  Eigen::MatrixXd T = edge_constant_traces(ne);
  Eigen::MatrixXd S(g->interior_count() + qs.dim_hplus(), ne);
  S.topRows(g->interior_count()) = qs.calculus().Kir * T;
  S.bottomRows(qs.dim_hplus()) = (th.theta * qs.g_rows_onb(Side::minus) - qs.g_rows_onb(Side::plus)) * T;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<std::vector<double>> basis;
  for (int j = 0; j < svd.matrixV().cols(); ++j) {
    if (j < svd.singularValues().size() && svd.singularValues()(j) > 1e-10 * std::max(1.0, smax)) continue;
    Eigen::VectorXd k = svd.matrixV().col(j);
    // orthonormalize in L2(nu_b)
    for (const auto& prev : basis) {
      double dot = 0.0;
      for (int e = 0; e < ne; ++e) dot += qs.field().nu_weights[e] * k(e) * prev[e];
      for (int e = 0; e < ne; ++e) k(e) -= dot * prev[e];
    }
    double nrm = 0.0;
    for (int e = 0; e < ne; ++e) nrm += qs.field().nu_weights[e] * k(e) * k(e);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) continue;
    std::vector<double> kv(ne);
    for (int e = 0; e < ne; ++e) kv[e] = k(e) / nrm;
    basis.push_back(std::move(kv));
  }
  return basis;
}

double kernel_invariance_check(const QuadrupleSpaces& qs, const Contraction& th, const EdgeFunction& v0,
                               double dt, double t_end) {
  if (!th.peradjoint_catalog)
    fail(errc::not_in_catalog, "kernel invariance is certified only for the per-adjoint catalog");
  auto basis = kernel_basis_constants(qs, th);
  EdgeFunction v = v0.rep() == Rep::sampled ? v0 : v0.to_sampled(kDefaultSamples);
  int n = v.sample_cells();
  EvolveOptions opts;
  for (const auto& k : basis) opts.probes.push_back(EdgeFunction::edge_constants(qs.graph(), k, Rep::sampled, n));
  // subtract the kernel projection of the initial state
  for (size_t i = 0; i < basis.size(); ++i) {
    double coeff = l2nu_inner_consistent(v, opts.probes[i], qs.field());
    EdgeFunction shift = opts.probes[i];
    shift *= -coeff;
    v += shift;
  }
  Trajectory traj = evolve_cn(qs, th, v, dt, t_end, opts);
  double worst = 0.0;
  for (size_t k = 0; k < traj.times.size(); ++k) {
    double p2 = 0.0;
    for (size_t i = 0; i < basis.size(); ++i) p2 += traj.probe_value[i][k] * traj.probe_value[i][k];
    worst = std::max(worst, std::sqrt(p2));
  }
  return worst;
}

double positivity_probe(const Trajectory& traj) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [t, snap] : traj.snapshots) m = std::min(m, snap.min_sample_value());
  return m;
}

nlohmann::ordered_json trajectory_summary(const Trajectory& traj) {
  nlohmann::ordered_json j;
  j["steps"] = traj.steps();
  j["t_end"] = traj.times.back();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& [t, snap] : traj.snapshots) {
    nlohmann::ordered_json row;
    row["t"] = t;
    size_t k = 0;
    while (k + 1 < traj.times.size() && traj.times[k] < t - 1e-15) ++k;
    row["norm"] = traj.norm[k];
    row["mass"] = traj.mass[k];
    nlohmann::ordered_json fx;
    for (size_t i = 0; i < traj.graph->boundary().size(); ++i)
      fx[traj.graph->vertex_id(traj.graph->boundary()[i])] = traj.boundary_flux[k][i];
    row["boundary_flux"] = fx;
    rows.push_back(row);
  }
  j["snapshots"] = rows;
  j["mass_balance_defect"] = mass_balance_check(traj);
  return j;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "t,edge,sample,value\n";
  for (const auto& [t, snap] : traj.snapshots) {
    for (int e = 0; e < traj.graph->edge_count(); ++e) {
      const auto& d = snap.edge_data(e);
      for (size_t s = 0; s < d.size(); ++s) {
        out += report::num(t);
        out += ',';
        out += traj.graph->edge(e).id;
        out += ',';
        out += std::to_string(s);
        out += ',';
        out += report::num(d[s]);
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace mgt
