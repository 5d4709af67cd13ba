/*
 * C interface to the metric-graph transport library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return MGT_OK on success and an error code otherwise;
 * mgt_last_error() describes the most recent failure on the calling thread.
 * Strings returned through char** are heap-allocated and must be released
 * with mgt_string_free().
 */
#ifndef MGT_MGT_H
#define MGT_MGT_H

#include <stdint.h>

#if defined(_WIN32)
#define MGT_API __declspec(dllexport)
#else
#define MGT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mgt_graph mgt_graph;
typedef struct mgt_function mgt_function;
typedef struct mgt_quadruple mgt_quadruple;
typedef struct mgt_theta mgt_theta;
typedef struct mgt_trajectory mgt_trajectory;

typedef enum mgt_status {
  MGT_OK = 0,
  MGT_ERR_DISCONNECTED,
  MGT_ERR_NONPOSITIVE_CONDUCTANCE,
  MGT_ERR_DUPLICATE_ID,
  MGT_ERR_UNKNOWN_VERTEX,
  MGT_ERR_BAD_DOCUMENT,
  MGT_ERR_GRAPH_MISMATCH,
  MGT_ERR_REPRESENTATION_MISMATCH,
  MGT_ERR_NOT_ENERGY_DOMINANT,
  MGT_ERR_SINGULAR_GRAM,
  MGT_ERR_NOT_BOUNDARY_VERTEX,
  MGT_ERR_EMPTY_BOUNDARY,
  MGT_ERR_INCOMPATIBLE_DATA,
  MGT_ERR_UNSUPPORTED_RHS,
  MGT_ERR_NOT_IN_DOMAIN,
  MGT_ERR_FIELD_INVALID,
  MGT_ERR_DIMENSION_MISMATCH,
  MGT_ERR_NOT_CONTRACTION,
  MGT_ERR_SINGULAR_SYSTEM,
  MGT_ERR_UNCOVERED_VERTEX,
  MGT_ERR_NOT_IN_CATALOG,
  MGT_ERR_LEVEL_TOO_LARGE,
  MGT_ERR_LEVEL_INSUFFICIENT,
  MGT_ERR_PROFILE_NOT_PERIODIC,
  MGT_ERR_INITIAL_MISMATCH,
  MGT_ERR_IO,
  MGT_ERR_USAGE,
  MGT_ERR_UNKNOWN,
} mgt_status;

MGT_API const char* mgt_last_error(void);
MGT_API const char* mgt_status_name(mgt_status s);
MGT_API void mgt_string_free(char* s);

/* ------------------------------------------------------------------ graphs */

/* Parse a graph description document (JSON: vertices, edges, boundary,
 * fields). */
MGT_API mgt_status mgt_graph_from_json(const char* json, mgt_graph** out);
/* Built-in fixtures: interval, circles, circles-equal, star-tree, k1,
 * sg1..sg3, sg1-reduced..sg3-reduced. */
MGT_API mgt_status mgt_graph_builtin(const char* name, mgt_graph** out);
/* Level-m gasket approximation with the catalog field embedded as "b". */
MGT_API mgt_status mgt_graph_sierpinski(int level, int reduced, mgt_graph** out);
MGT_API mgt_status mgt_graph_to_json(const mgt_graph* g, char** json);
MGT_API void mgt_graph_free(mgt_graph* g);

MGT_API int mgt_graph_vertex_count(const mgt_graph* g);
MGT_API int mgt_graph_edge_count(const mgt_graph* g);
MGT_API int mgt_graph_boundary_count(const mgt_graph* g);
MGT_API int mgt_graph_cycle_rank(const mgt_graph* g);

/* Flags and residuals of a named edge-constant field, as JSON. */
MGT_API mgt_status mgt_field_check(const mgt_graph* g, const char* field, char** report_json);
/* Fundamental cycle basis as CSV (edge id, one column per cycle). */
MGT_API mgt_status mgt_cycle_basis_csv(const mgt_graph* g, char** csv);

/* --------------------------------------------------------------- functions */

MGT_API mgt_status mgt_function_from_json(const mgt_graph* g, const char* json, mgt_function** out);
MGT_API mgt_status mgt_function_to_json(const mgt_function* f, char** json);
/* Random element of D(dbot_B) for the named field; deterministic in seed. */
MGT_API mgt_status mgt_function_random_domain(const mgt_graph* g, const char* field, uint64_t seed,
                                              mgt_function** out);
/* Sampled bump supported on one edge: amplitude * bump((x-lo)/(hi-lo)). */
MGT_API mgt_status mgt_function_bump(const mgt_graph* g, const char* edge_id, double lo, double hi,
                                     double amplitude, int samples, mgt_function** out);
MGT_API void mgt_function_free(mgt_function* f);

/* ------------------------------------------------------- decomposition ops */

/* Hodge split F = dg + cycle part of an edge function read as a 1-form. */
MGT_API mgt_status mgt_hodge_decompose(const mgt_function* form, char** report_json);
/* Key decomposition f = g + star^{-1} du + w for the named field. */
MGT_API mgt_status mgt_key_decompose(const mgt_graph* g, const char* field, const mgt_function* f,
                                     char** json);
MGT_API mgt_status mgt_ibp_residual(const mgt_graph* g, const char* field, const mgt_function* f1,
                                    const mgt_function* f2, double* residual);

/* ---------------------------------------------------------------- quadruple */

MGT_API mgt_status mgt_quadruple_build(const mgt_graph* g, const char* field, mgt_quadruple** out);
MGT_API void mgt_quadruple_free(mgt_quadruple* q);
MGT_API mgt_status mgt_quadruple_describe(const mgt_quadruple* q, char** json);
MGT_API int mgt_quadruple_dim_hminus(const mgt_quadruple* q);
MGT_API int mgt_quadruple_dim_hplus(const mgt_quadruple* q);
MGT_API mgt_status mgt_quadruple_identity_residual(const mgt_quadruple* q, const mgt_function* f1,
                                                   const mgt_function* f2, double* residual);
/* side: 0 = G-, 1 = G+; result as JSON boundary-vector coordinates. */
MGT_API mgt_status mgt_apply_g(const mgt_quadruple* q, int side, const mgt_function* f, char** json);

/* ------------------------------------------------------------ contractions */

/* CSV layout: header "rows,cols", then row-major entries in the orthonormal
 * coordinates of H- and H+. */
MGT_API mgt_status mgt_theta_from_csv(const mgt_quadruple* q, const char* csv, mgt_theta** out);
/* Catalog: "zero" | "identity" | "scalar" (parameter = value) |
 * "circles-theta-bar" (parameter = hinge value) | "tree-periodic" |
 * "sg-normal-periodic" | "sg-degenerate-periodic". */
MGT_API mgt_status mgt_theta_catalog(const mgt_quadruple* q, const char* tag, double parameter,
                                     mgt_theta** out);
MGT_API void mgt_theta_free(mgt_theta* t);
MGT_API mgt_status mgt_theta_check(const mgt_quadruple* q, const mgt_theta* t, int* is_contraction,
                                   double* sigma_max);
MGT_API mgt_status mgt_in_domain_theta(const mgt_quadruple* q, const mgt_theta* t, const mgt_function* f,
                                       int* in_domain, double* residual);

/* ---------------------------------------------------------------- evolution */

MGT_API mgt_status mgt_resolvent_solve(const mgt_quadruple* q, const mgt_theta* t, double lambda,
                                       const mgt_function* rhs, int n_out, mgt_function** out,
                                       double* solution_norm);
MGT_API mgt_status mgt_evolve_cn(const mgt_quadruple* q, const mgt_theta* t, const mgt_function* v0,
                                 double dt, double t_end, int snapshot_stride, mgt_trajectory** out);
/* Catalog scattering rules: "interval-theta" (parameter = theta) |
 * "circles-theta-bar" (parameter) | "k1-identity" | "flow-absorbing" |
 * "flow-periodic". */
MGT_API mgt_status mgt_evolve_scattering(const mgt_graph* g, const char* field, const char* rule_tag,
                                         double parameter, const mgt_function* v0, double dt, double t_end,
                                         int snapshot_stride, mgt_trajectory** out);
MGT_API void mgt_trajectory_free(mgt_trajectory* tr);
MGT_API mgt_status mgt_trajectory_csv(const mgt_trajectory* tr, char** csv);
MGT_API mgt_status mgt_trajectory_summary(const mgt_trajectory* tr, char** json);
MGT_API mgt_status mgt_trajectory_svg(const mgt_trajectory* tr, char** svg);
MGT_API mgt_status mgt_trajectory_mass_balance(const mgt_trajectory* tr, double* residual);
MGT_API mgt_status mgt_trajectory_min_value(const mgt_trajectory* tr, double* min_value);
MGT_API mgt_status mgt_trajectory_last(const mgt_trajectory* tr, mgt_function** out);

/* --------------------------------------------------------------- sierpinski */

/* case_tag: "normal-reduced" | "degenerate"; profile_tag: "sine" | "sine2" |
 * "bump". */
MGT_API mgt_status mgt_sg_cylindrical(int level, const char* case_tag, const char* profile_tag, double t,
                                      int samples, mgt_function** out);
MGT_API mgt_status mgt_sg_convergence_csv(const char* case_tag, const char* profile_tag, const int* levels,
                                          int level_count, char** csv);

/* --------------------------------------------------------------- acceptance */

/* Runs the full verification suite; all_pass reports the verdict. */
MGT_API mgt_status mgt_verify_all(char** report_json, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* MGT_MGT_H */
