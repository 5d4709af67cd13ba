#include "mgt/mgt.h"

#include <cmath>
#include <cstring>

#include "mgt/acceptance.hpp"
#include "mgt/fixtures.hpp"
#include "mgt/report.hpp"
#include "mgt/scattering.hpp"
#include "mgt/sierpinski.hpp"

using namespace mgt;

struct mgt_graph {
  GraphPtr g;
};
struct mgt_function {
  EdgeFunction f;
};
struct mgt_quadruple {
  QuadrupleSpaces qs;
};
struct mgt_theta {
  Contraction th;
};
struct mgt_trajectory {
  Trajectory traj;
  VelocityField field;
};

namespace {

thread_local std::string g_last_error;

mgt_status to_status(errc c) {
  switch (c) {
    case errc::ok: return MGT_OK;
    case errc::disconnected: return MGT_ERR_DISCONNECTED;
    case errc::nonpositive_conductance: return MGT_ERR_NONPOSITIVE_CONDUCTANCE;
    case errc::duplicate_id: return MGT_ERR_DUPLICATE_ID;
    case errc::unknown_vertex: return MGT_ERR_UNKNOWN_VERTEX;
    case errc::bad_document: return MGT_ERR_BAD_DOCUMENT;
    case errc::graph_mismatch: return MGT_ERR_GRAPH_MISMATCH;
    case errc::representation_mismatch: return MGT_ERR_REPRESENTATION_MISMATCH;
    case errc::not_energy_dominant: return MGT_ERR_NOT_ENERGY_DOMINANT;
    case errc::singular_gram: return MGT_ERR_SINGULAR_GRAM;
    case errc::not_boundary_vertex: return MGT_ERR_NOT_BOUNDARY_VERTEX;
    case errc::empty_boundary: return MGT_ERR_EMPTY_BOUNDARY;
    case errc::incompatible_data: return MGT_ERR_INCOMPATIBLE_DATA;
    case errc::unsupported_rhs: return MGT_ERR_UNSUPPORTED_RHS;
    case errc::not_in_domain: return MGT_ERR_NOT_IN_DOMAIN;
    case errc::field_invalid: return MGT_ERR_FIELD_INVALID;
    case errc::dimension_mismatch: return MGT_ERR_DIMENSION_MISMATCH;
    case errc::not_contraction: return MGT_ERR_NOT_CONTRACTION;
    case errc::singular_system: return MGT_ERR_SINGULAR_SYSTEM;
    case errc::uncovered_vertex: return MGT_ERR_UNCOVERED_VERTEX;
    case errc::not_in_catalog: return MGT_ERR_NOT_IN_CATALOG;
    case errc::level_too_large: return MGT_ERR_LEVEL_TOO_LARGE;
    case errc::level_insufficient: return MGT_ERR_LEVEL_INSUFFICIENT;
    case errc::profile_not_periodic: return MGT_ERR_PROFILE_NOT_PERIODIC;
    case errc::initial_mismatch: return MGT_ERR_INITIAL_MISMATCH;
    case errc::io_error: return MGT_ERR_IO;
    case errc::usage: return MGT_ERR_USAGE;
  }
  return MGT_ERR_UNKNOWN;
}

template <typename Fn>
mgt_status guarded(Fn&& fn) {
  try {
    fn();
    return MGT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MGT_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

VelocityField field_of(const mgt_graph* g, const char* name) {
  return field_from_document(g->g, name ? name : "b");
}

double profile_bump(double y) {
  y -= std::floor(y);
  if (y <= 0.1 || y >= 0.9) return 0.0;
  double s = 2.0 * (y - 0.1) / 0.8 - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

std::function<double(double)> profile_by_tag(const std::string& tag, double& deriv_sup) {
  if (tag == "sine") {
    deriv_sup = 2.0 * M_PI;
    return [](double y) { return std::sin(2.0 * M_PI * y); };
  }
  if (tag == "sine2") {
    deriv_sup = 4.0 * M_PI;
    return [](double y) { return std::sin(4.0 * M_PI * y); };
  }
  if (tag == "bump") {
    deriv_sup = 5.0;  // numeric bound for the compact bump
    return profile_bump;
  }
  fail(errc::not_in_catalog, "unknown profile '" + tag + "'");
}

SgCase case_by_tag(const std::string& tag) {
  if (tag == "normal-reduced") return SgCase::normal_reduced;
  if (tag == "degenerate") return SgCase::degenerate;
  fail(errc::not_in_catalog, "unknown cylindrical case '" + tag + "'");
}

}  // namespace

extern "C" {

const char* mgt_last_error(void) { return g_last_error.c_str(); }

const char* mgt_status_name(mgt_status s) {
  switch (s) {
    case MGT_OK: return "OK";
    case MGT_ERR_DISCONNECTED: return "DISCONNECTED";
    case MGT_ERR_NONPOSITIVE_CONDUCTANCE: return "NONPOSITIVE_CONDUCTANCE";
    case MGT_ERR_DUPLICATE_ID: return "DUPLICATE_ID";
    case MGT_ERR_UNKNOWN_VERTEX: return "UNKNOWN_VERTEX";
    case MGT_ERR_BAD_DOCUMENT: return "BAD_DOCUMENT";
    case MGT_ERR_GRAPH_MISMATCH: return "GRAPH_MISMATCH";
    case MGT_ERR_REPRESENTATION_MISMATCH: return "REPRESENTATION_MISMATCH";
    case MGT_ERR_NOT_ENERGY_DOMINANT: return "NOT_ENERGY_DOMINANT";
    case MGT_ERR_SINGULAR_GRAM: return "SINGULAR_GRAM";
    case MGT_ERR_NOT_BOUNDARY_VERTEX: return "NOT_BOUNDARY_VERTEX";
    case MGT_ERR_EMPTY_BOUNDARY: return "EMPTY_BOUNDARY";
    case MGT_ERR_INCOMPATIBLE_DATA: return "INCOMPATIBLE_DATA";
    case MGT_ERR_UNSUPPORTED_RHS: return "UNSUPPORTED_RHS";
    case MGT_ERR_NOT_IN_DOMAIN: return "NOT_IN_DOMAIN";
    case MGT_ERR_FIELD_INVALID: return "FIELD_INVALID";
    case MGT_ERR_DIMENSION_MISMATCH: return "DIMENSION_MISMATCH";
    case MGT_ERR_NOT_CONTRACTION: return "NOT_CONTRACTION";
    case MGT_ERR_SINGULAR_SYSTEM: return "SINGULAR_SYSTEM";
    case MGT_ERR_UNCOVERED_VERTEX: return "UNCOVERED_VERTEX";
    case MGT_ERR_NOT_IN_CATALOG: return "NOT_IN_CATALOG";
    case MGT_ERR_LEVEL_TOO_LARGE: return "LEVEL_TOO_LARGE";
    case MGT_ERR_LEVEL_INSUFFICIENT: return "LEVEL_INSUFFICIENT";
    case MGT_ERR_PROFILE_NOT_PERIODIC: return "PROFILE_NOT_PERIODIC";
    case MGT_ERR_INITIAL_MISMATCH: return "INITIAL_MISMATCH";
    case MGT_ERR_IO: return "IO_ERROR";
    case MGT_ERR_USAGE: return "USAGE";
    default: return "UNKNOWN";
  }
}

void mgt_string_free(char* s) { std::free(s); }

mgt_status mgt_graph_from_json(const char* json, mgt_graph** out) {
  return guarded([&] { *out = new mgt_graph{make_graph(MetricGraph::from_document(json ? json : ""))}; });
}

mgt_status mgt_graph_builtin(const char* name, mgt_graph** out) {
  return guarded([&] { *out = new mgt_graph{fixture(name ? name : "").graph}; });
}

mgt_status mgt_graph_sierpinski(int level, int reduced, mgt_graph** out) {
  return guarded([&] {
    std::string name = "sg" + std::to_string(level) + (reduced ? "-reduced" : "");
    *out = new mgt_graph{fixture(name).graph};
  });
}

mgt_status mgt_graph_to_json(const mgt_graph* g, char** json) {
  return guarded([&] { *json = dup_string(g->g->to_document()); });
}

void mgt_graph_free(mgt_graph* g) { delete g; }

int mgt_graph_vertex_count(const mgt_graph* g) { return g->g->vertex_count(); }
int mgt_graph_edge_count(const mgt_graph* g) { return g->g->edge_count(); }
int mgt_graph_boundary_count(const mgt_graph* g) { return static_cast<int>(g->g->boundary().size()); }
int mgt_graph_cycle_rank(const mgt_graph* g) { return g->g->cycle_rank(); }

mgt_status mgt_field_check(const mgt_graph* g, const char* field, char** report_json) {
  return guarded([&] {
    VelocityField f = field_of(g, field);
    nlohmann::ordered_json j;
    j["field"] = field ? field : "b";
    j["minimal_energy_dominant"] = f.minimal_energy_dominant;
    j["divergence_free_wrt_B"] = f.divergence_free_wrt_B;
    j["solenoidal"] = f.solenoidal;
    j["max_interior_kirchhoff_residual"] = f.max_kirchhoff_residual;
    j["nu_b_mass"] = f.total_mass();
    *report_json = dup_string(report::dump_json(j));
  });
}

mgt_status mgt_cycle_basis_csv(const mgt_graph* g, char** csv) {
  return guarded([&] { *csv = dup_string(cycles_to_csv(cycle_basis(g->g))); });
}

mgt_status mgt_function_from_json(const mgt_graph* g, const char* json, mgt_function** out) {
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json ? json : "");
    } catch (const std::exception& ex) {
      fail(errc::bad_document, ex.what());
    }
    *out = new mgt_function{EdgeFunction::from_json(g->g, doc)};
  });
}

mgt_status mgt_function_to_json(const mgt_function* f, char** json) {
  return guarded([&] { *json = dup_string(report::dump_json(f->f.to_json())); });
}

mgt_status mgt_function_random_domain(const mgt_graph* g, const char* field, uint64_t seed,
                                      mgt_function** out) {
  return guarded([&] { *out = new mgt_function{random_domain_element(field_of(g, field), seed)}; });
}

mgt_status mgt_function_bump(const mgt_graph* g, const char* edge_id, double lo, double hi,
                             double amplitude, int samples, mgt_function** out) {
  return guarded([&] {
    int e = g->g->edge_index(edge_id ? edge_id : "");
    if (!(lo < hi) || samples < 2) fail(errc::usage, "need lo < hi and at least 2 samples");
    std::vector<std::vector<double>> data(g->g->edge_count(), std::vector<double>(samples + 1, 0.0));
    for (int j = 0; j <= samples; ++j) {
      double x = double(j) / samples;
      if (x > lo && x < hi) {
        double y = 2.0 * (x - lo) / (hi - lo) - 1.0;
        data[e][j] = amplitude * std::exp(1.0 - 1.0 / (1.0 - y * y));
      }
    }
    *out = new mgt_function{EdgeFunction::sampled(g->g, std::move(data))};
  });
}

void mgt_function_free(mgt_function* f) { delete f; }

mgt_status mgt_hodge_decompose(const mgt_function* form, char** report_json) {
  return guarded([&] {
    HodgeDecomposition hd = hodge_decompose(form->f);
    const auto& g = form->f.graph();
    nlohmann::ordered_json j;
    j["potential"] = hd.g.edge_function().to_json();
    nlohmann::ordered_json cyc;
    for (int e = 0; e < g->edge_count(); ++e) cyc[g->edge(e).id] = hd.cycle[e];
    j["cycle"] = cyc;
    EdgeFunction resid = form->f;
    resid -= hd.g.edge_function().derivative();
    resid -= EdgeFunction::edge_constants(g, hd.cycle, resid.rep(),
                                          resid.rep() == Rep::sampled ? resid.sample_cells() : 0);
    j["reconstruction_residual_h"] = std::sqrt(std::max(0.0, h_inner(resid, resid)));
    j["orthogonality_h"] =
        h_inner(hd.g.edge_function().derivative(), EdgeFunction::edge_constants(g, hd.cycle));
    *report_json = dup_string(report::dump_json(j));
  });
}

mgt_status mgt_key_decompose(const mgt_graph* g, const char* field, const mgt_function* f, char** json) {
  return guarded([&] {
    VelocityField b = field_of(g, field);
    KeyDecomposition kd = key_decompose(f->f, b);
    nlohmann::ordered_json j = key_decomposition_to_json(kd, b);
    EdgeFunction rec = kd.reconstruct(b);
    rec -= f->f;
    j["reconstruction_residual"] = l2nu_norm(rec, b);
    *json = dup_string(report::dump_json(j));
  });
}

mgt_status mgt_ibp_residual(const mgt_graph* g, const char* field, const mgt_function* f1,
                            const mgt_function* f2, double* residual) {
  return guarded([&] { *residual = ibp_check(f1->f, f2->f, field_of(g, field)); });
}

mgt_status mgt_quadruple_build(const mgt_graph* g, const char* field, mgt_quadruple** out) {
  return guarded([&] { *out = new mgt_quadruple{QuadrupleSpaces::build(field_of(g, field))}; });
}

void mgt_quadruple_free(mgt_quadruple* q) { delete q; }

mgt_status mgt_quadruple_describe(const mgt_quadruple* q, char** json) {
  return guarded([&] { *json = dup_string(report::dump_json(q->qs.describe())); });
}

int mgt_quadruple_dim_hminus(const mgt_quadruple* q) { return q->qs.dim_hminus(); }
int mgt_quadruple_dim_hplus(const mgt_quadruple* q) { return q->qs.dim_hplus(); }

mgt_status mgt_quadruple_identity_residual(const mgt_quadruple* q, const mgt_function* f1,
                                           const mgt_function* f2, double* residual) {
  return guarded([&] { *residual = q->qs.identity_check(f1->f, f2->f); });
}

mgt_status mgt_apply_g(const mgt_quadruple* q, int side, const mgt_function* f, char** json) {
  return guarded([&] {
    Eigen::VectorXd v = q->qs.apply_G(side == 0 ? Side::minus : Side::plus, f->f);
    *json = dup_string(report::dump_json(q->qs.boundary_vector_to_json(v)));
  });
}

mgt_status mgt_theta_from_csv(const mgt_quadruple* q, const char* csv, mgt_theta** out) {
  return guarded([&] {
    Eigen::MatrixXd m = theta_from_csv(csv ? csv : "");
    *out = new mgt_theta{theta_from_matrix(q->qs, m, "csv")};
  });
}

mgt_status mgt_theta_catalog(const mgt_quadruple* q, const char* tag, double parameter, mgt_theta** out) {
  return guarded([&] {
    std::string t = tag ? tag : "";
    Contraction th;
    if (t == "zero") th = theta_zero(q->qs);
    else if (t == "identity") th = theta_identity(q->qs);
    else if (t == "scalar") th = theta_scalar(q->qs, parameter);
    else if (t == "circles-theta-bar")
      th = theta_scalar(q->qs, theta_from_theta_bar(q->qs.field().b[0], parameter));
    else if (t == "tree-periodic") th = theta_tree_periodic(q->qs);
    else if (t == "sg-normal-periodic") th = theta_sg_normal_periodic(q->qs);
    else if (t == "sg-degenerate-periodic") th = theta_sg_degenerate_periodic(q->qs);
    else fail(errc::not_in_catalog, "unknown contraction tag '" + t + "'");
    *out = new mgt_theta{std::move(th)};
  });
}

void mgt_theta_free(mgt_theta* t) { delete t; }

mgt_status mgt_theta_check(const mgt_quadruple* q, const mgt_theta* t, int* is_contraction,
                           double* sigma_max) {
  return guarded([&] {
    auto chk = q->qs.check_contraction(t->th.theta);
    *is_contraction = chk.contraction ? 1 : 0;
    *sigma_max = chk.sigma_max;
  });
}

mgt_status mgt_in_domain_theta(const mgt_quadruple* q, const mgt_theta* t, const mgt_function* f,
                               int* in_domain, double* residual) {
  return guarded([&] {
    DomainResidual dr = in_domain_theta(q->qs, t->th, f->f);
    *in_domain = dr.in_domain ? 1 : 0;
    *residual = dr.residual;
  });
}

mgt_status mgt_resolvent_solve(const mgt_quadruple* q, const mgt_theta* t, double lambda,
                               const mgt_function* rhs, int n_out, mgt_function** out,
                               double* solution_norm) {
  return guarded([&] {
    ResolventSolution sol = resolvent_solve(q->qs, t->th, lambda, rhs->f, n_out > 1 ? n_out : 256);
    if (solution_norm) *solution_norm = sol.exact_l2nu_norm(q->qs.field());
    *out = new mgt_function{std::move(sol.f)};
  });
}

mgt_status mgt_evolve_cn(const mgt_quadruple* q, const mgt_theta* t, const mgt_function* v0, double dt,
                         double t_end, int snapshot_stride, mgt_trajectory** out) {
  return guarded([&] {
    EvolveOptions opts;
    opts.snapshot_stride = snapshot_stride;
    *out = new mgt_trajectory{evolve_cn(q->qs, t->th, v0->f, dt, t_end, opts), q->qs.field()};
  });
}

mgt_status mgt_evolve_scattering(const mgt_graph* g, const char* field, const char* rule_tag,
                                 double parameter, const mgt_function* v0, double dt, double t_end,
                                 int snapshot_stride, mgt_trajectory** out) {
  return guarded([&] {
    VelocityField b = field_of(g, field);
    std::string tag = rule_tag ? rule_tag : "";
    ScatteringRule rule;
    if (tag == "interval-theta") {
      rule = rule_interval(b, parameter);
    } else if (tag == "circles-theta-bar") {
      rule = rule_circles(b, parameter);
    } else if (tag == "k1-identity") {
      rule = rule_k1_identity(b);
    } else if (tag == "flow-absorbing") {
      rule = rule_flow_continuity(b, {}, "flow-absorbing");
    } else if (tag == "flow-periodic") {
      BoundaryPartition part = partition_boundary(b);
      if (part.neg.size() != 1) fail(errc::not_in_catalog, "flow-periodic needs a single inflow vertex");
      std::vector<std::pair<int, int>> links;
      for (int qv : part.pos) links.emplace_back(qv, part.neg[0]);
      rule = rule_flow_continuity(b, links, "flow-periodic");
    } else {
      fail(errc::not_in_catalog, "unknown scattering rule '" + tag + "'");
    }
    EvolveOptions opts;
    opts.snapshot_stride = snapshot_stride;
    *out = new mgt_trajectory{evolve_scattering(b, rule, v0->f, dt, t_end, opts), b};
  });
}

void mgt_trajectory_free(mgt_trajectory* tr) { delete tr; }

mgt_status mgt_trajectory_csv(const mgt_trajectory* tr, char** csv) {
  return guarded([&] { *csv = dup_string(trajectory_to_csv(tr->traj)); });
}

mgt_status mgt_trajectory_summary(const mgt_trajectory* tr, char** json) {
  return guarded([&] { *json = dup_string(report::dump_json(trajectory_summary(tr->traj))); });
}

mgt_status mgt_trajectory_svg(const mgt_trajectory* tr, char** svg) {
  return guarded([&] {
    std::vector<std::pair<std::string, std::vector<double>>> curves;
    const auto& last = tr->traj.last();
    for (int e = 0; e < tr->traj.graph->edge_count(); ++e)
      curves.emplace_back(tr->traj.graph->edge(e).id, last.edge_data(e));
    *svg = dup_string(report::svg_snapshot(curves));
  });
}

mgt_status mgt_trajectory_mass_balance(const mgt_trajectory* tr, double* residual) {
  return guarded([&] { *residual = mass_balance_check(tr->traj); });
}

mgt_status mgt_trajectory_min_value(const mgt_trajectory* tr, double* min_value) {
  return guarded([&] { *min_value = positivity_probe(tr->traj); });
}

mgt_status mgt_trajectory_last(const mgt_trajectory* tr, mgt_function** out) {
  return guarded([&] { *out = new mgt_function{tr->traj.last()}; });
}

mgt_status mgt_sg_cylindrical(int level, const char* case_tag, const char* profile_tag, double t,
                              int samples, mgt_function** out) {
  return guarded([&] {
    SgCase c = case_by_tag(case_tag ? case_tag : "");
    double deriv = 0.0;
    auto profile = profile_by_tag(profile_tag ? profile_tag : "", deriv);
    SGLevelGraph sg = sg_graph(level, c == SgCase::normal_reduced);
    *out = new mgt_function{cylindrical_solution(sg, c, profile, t, samples > 1 ? samples : 64)};
  });
}

mgt_status mgt_sg_convergence_csv(const char* case_tag, const char* profile_tag, const int* levels,
                                  int level_count, char** csv) {
  return guarded([&] {
    SgCase c = case_by_tag(case_tag ? case_tag : "");
    double deriv = 0.0;
    auto profile = profile_by_tag(profile_tag ? profile_tag : "", deriv);
    std::vector<int> lv(levels, levels + level_count);
    *csv = dup_string(convergence_to_csv(convergence_experiment(profile, deriv, c, lv)));
  });
}

mgt_status mgt_verify_all(char** report_json, int* all_pass) {
  return guarded([&] {
    auto results = acceptance::run_all();
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    if (all_pass) *all_pass = all ? 1 : 0;
    if (report_json) *report_json = dup_string(report::dump_json(acceptance::report_json(results)));
  });
}

}  // extern "C"
