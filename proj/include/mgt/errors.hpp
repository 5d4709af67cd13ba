#pragma once

#include <stdexcept>
#include <string>

namespace mgt {

enum class errc {
  ok = 0,
  disconnected,
  nonpositive_conductance,
  duplicate_id,
  unknown_vertex,
  bad_document,
  graph_mismatch,
  representation_mismatch,
  not_energy_dominant,
  singular_gram,
  not_boundary_vertex,
  empty_boundary,
  incompatible_data,
  unsupported_rhs,
  not_in_domain,
  field_invalid,
  dimension_mismatch,
  not_contraction,
  singular_system,
  uncovered_vertex,
  not_in_catalog,
  level_too_large,
  level_insufficient,
  profile_not_periodic,
  initial_mismatch,
  io_error,
  usage,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

// Tolerances shared across modules. Values are fixed by the library contract,
// not tunable at runtime.
namespace tol {
inline constexpr double med = 1e-12;         // minimal energy dominance: min |b_e| > med
inline constexpr double kirchhoff = 1e-12;   // field divergence residual per vertex
inline constexpr double domain = 1e-10;      // weighted Kirchhoff residual for D(dbot)
inline constexpr double compat = 1e-10;      // Neumann compatibility defect
inline constexpr double partition = 1e-12;   // zero test for normal parts of b
inline constexpr double contraction = 1e-10; // slack on the largest singular value
inline constexpr double continuity = 1e-12;  // sampled trace/vertex mismatch (relative)
inline constexpr double theta_domain = 1e-9; // |Theta G- f - G+ f| for membership
}  // namespace tol

}  // namespace mgt
