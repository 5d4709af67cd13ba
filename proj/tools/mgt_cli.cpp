// Command-line front end. Everything goes through the C API in mgt/mgt.h.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mgt/mgt.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void die(mgt_status s) {
  std::cerr << "error: " << mgt_status_name(s) << ": " << mgt_last_error() << "\n";
  std::exit(s == MGT_ERR_USAGE || s == MGT_ERR_IO ? kExitUsage : kExitCheckFailed);
}

void check(mgt_status s) {
  if (s != MGT_OK) die(s);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  mgt_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open '" << path << "'\n";
    std::exit(kExitUsage);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::string path = dir.empty() ? name : dir + "/" + name;
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write '" << path << "'\n";
    std::exit(kExitUsage);
  }
  f << content;
  std::cout << "wrote " << path << "\n";
}

struct GraphHandle {
  mgt_graph* g = nullptr;
  ~GraphHandle() { mgt_graph_free(g); }
};

// --graph accepts a file path or builtin:<fixture-name>
void load_graph(const std::string& spec, GraphHandle& gh) {
  if (spec.rfind("builtin:", 0) == 0) {
    check(mgt_graph_builtin(spec.substr(8).c_str(), &gh.g));
  } else {
    check(mgt_graph_from_json(read_file(spec).c_str(), &gh.g));
  }
}

struct FunctionHandle {
  mgt_function* f = nullptr;
  ~FunctionHandle() { mgt_function_free(f); }
};

// --v0/--input accept a JSON file or bump:<edge>:<lo>:<hi>:<amplitude>
void load_function(const mgt_graph* g, const std::string& spec, int samples, FunctionHandle& fh) {
  if (spec.rfind("bump:", 0) == 0) {
    std::string rest = spec.substr(5);
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty() || parts.size() > 4) {
      std::cerr << "error: bump spec is bump:<edge>[:<lo>:<hi>[:<amplitude>]]\n";
      std::exit(kExitUsage);
    }
    double lo = parts.size() > 2 ? std::stod(parts[1]) : 0.25;
    double hi = parts.size() > 2 ? std::stod(parts[2]) : 0.75;
    double amp = parts.size() > 3 ? std::stod(parts[3]) : 1.0;
    check(mgt_function_bump(g, parts[0].c_str(), lo, hi, amp, samples, &fh.f));
  } else {
    check(mgt_function_from_json(g, read_file(spec).c_str(), &fh.f));
  }
}

struct ThetaHandle {
  mgt_theta* t = nullptr;
  ~ThetaHandle() { mgt_theta_free(t); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transport and continuity equations on metric graphs"};
  app.require_subcommand(1);

  std::string graph_spec, field = "b", output_dir, input_spec, f1_spec, f2_spec;
  std::string theta_csv, theta_tag, rule_tag, case_tag = "degenerate", profile_tag = "sine";
  double theta_value = 0.0, rule_value = 0.0, dt = 1e-3, t_end = 1.0, lambda = 0.0, t_eval = 0.0;
  int snapshots = 0, samples = 256, random_n = 0, level = 1;
  unsigned long long seed = 1;
  bool reduced = false, svg = false, export_cycles = false;
  std::vector<int> levels = {1, 2, 3, 4, 5};

  auto add_graph = [&](CLI::App* cmd) {
    cmd->add_option("--graph", graph_spec, "graph document path or builtin:<name>")->required();
    cmd->add_option("--field", field, "edge-constant field name (default b)");
    cmd->add_option("--output", output_dir, "output directory");
  };

  auto* g_validate = app.add_subcommand("graph", "graph document operations")
                         ->require_subcommand(1);
  auto* gv = g_validate->add_subcommand("validate", "parse, validate and summarize a graph");
  add_graph(gv);

  auto* fc = app.add_subcommand("field", "velocity field checks")->require_subcommand(1);
  auto* fck = fc->add_subcommand("check", "minimal energy dominance and divergence flags");
  add_graph(fck);

  auto* hodge = app.add_subcommand("hodge", "Hodge split of an edge 1-form");
  add_graph(hodge);
  hodge->add_option("--input", input_spec, "edge function JSON (or bump:<edge>:...)")->required();
  hodge->add_flag("--export-cycles", export_cycles, "also write the cycle basis CSV");

  auto* dec = app.add_subcommand("decompose", "key decomposition f = g + star^-1 du + w");
  add_graph(dec);
  dec->add_option("--input", input_spec, "edge function JSON (or bump:<edge>:...)")->required();

  auto* ibp = app.add_subcommand("ibp-check", "integration by parts residual");
  add_graph(ibp);
  ibp->add_option("--f1", f1_spec, "first domain element (JSON)");
  ibp->add_option("--f2", f2_spec, "second domain element (JSON)");
  ibp->add_option("--random", random_n, "number of random pairs instead of --f1/--f2");
  ibp->add_option("--seed", seed, "random seed");

  auto* quad = app.add_subcommand("quadruple", "boundary quadruple operations")->require_subcommand(1);
  auto* qchk = quad->add_subcommand("check", "identity residuals and contraction test");
  add_graph(qchk);
  qchk->add_option("--theta", theta_csv, "contraction matrix CSV (orthonormal coordinates)");
  qchk->add_option("--random", random_n, "number of random pairs for the identity sweep");
  qchk->add_option("--seed", seed, "random seed");

  auto* evolve = app.add_subcommand("evolve", "contraction semigroup evolution");
  add_graph(evolve);
  evolve->add_option("--v0", input_spec, "initial state JSON or bump:<edge>[:<lo>:<hi>[:<amp>]]")
      ->required();
  evolve->add_option("--theta", theta_csv, "contraction matrix CSV -> Crank-Nicolson evolution");
  evolve->add_option("--theta-tag", theta_tag,
                     "catalog contraction: zero|identity|scalar|circles-theta-bar|tree-periodic|"
                     "sg-normal-periodic|sg-degenerate-periodic");
  evolve->add_option("--theta-value", theta_value, "parameter for scalar/circles-theta-bar");
  evolve->add_option("--theta-bar", rule_value, "two-circle hinge parameter (scattering)");
  evolve->add_option("--rule", rule_tag,
                     "catalog scattering rule: interval-theta|circles-theta-bar|k1-identity|"
                     "flow-absorbing|flow-periodic");
  evolve->add_option("--rule-value", rule_value, "parameter for the scattering rule");
  evolve->add_option("--dt", dt, "time step");
  evolve->add_option("--t-end", t_end, "final time");
  evolve->add_option("--snapshots", snapshots, "snapshot stride in steps (0: first and last)");
  evolve->add_option("--samples", samples, "samples per edge for bump initial states");
  evolve->add_option("--lambda", lambda, "if > 0: run a single resolvent solve instead of stepping");
  evolve->add_flag("--svg", svg, "write an SVG of the final snapshot");

  auto* sg = app.add_subcommand("sg", "gasket approximation tools")->require_subcommand(1);
  auto* sgb = sg->add_subcommand("build", "emit the level-m graph document");
  sgb->add_option("--level", level, "approximation level")->required();
  sgb->add_flag("--reduced", reduced, "drop the flat edge next to q0");
  sgb->add_option("--output", output_dir, "output directory");
  auto* sgc = sg->add_subcommand("cylindrical", "sampled pull-back solution V(h(x) - t)");
  sgc->add_option("--level", level, "approximation level")->required();
  sgc->add_option("--case", case_tag, "normal-reduced | degenerate");
  sgc->add_option("--profile", profile_tag, "sine | sine2 | bump");
  sgc->add_option("--t", t_eval, "evaluation time");
  sgc->add_option("--samples", samples, "samples per edge");
  sgc->add_option("--output", output_dir, "output directory");
  auto* sgv = sg->add_subcommand("converge", "sup-error table across levels");
  sgv->add_option("--case", case_tag, "normal-reduced | degenerate");
  sgv->add_option("--profile", profile_tag, "sine | sine2 | bump");
  sgv->add_option("--levels", levels, "levels to evaluate");
  sgv->add_option("--output", output_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "verification suites")->require_subcommand(1);
  auto* vall = verify->add_subcommand("all", "run every acceptance criterion");
  std::string fixtures = "builtin";
  vall->add_option("--fixtures", fixtures, "fixture set (builtin)");
  vall->add_option("--output", output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  if (gv->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    std::printf("vertices %d, edges %d, boundary %d, cycle rank %d\n", mgt_graph_vertex_count(gh.g),
                mgt_graph_edge_count(gh.g), mgt_graph_boundary_count(gh.g), mgt_graph_cycle_rank(gh.g));
    char* json = nullptr;
    check(mgt_graph_to_json(gh.g, &json));
    if (!output_dir.empty()) write_file(output_dir, "graph.json", take(json));
    else mgt_string_free(json);
    return kExitOk;
  }

  if (fck->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    char* report = nullptr;
    check(mgt_field_check(gh.g, field.c_str(), &report));
    std::string body = take(report);
    std::cout << body;
    if (!output_dir.empty()) write_file(output_dir, "field_check.json", body);
    bool ok = body.find("\"minimal_energy_dominant\": true") != std::string::npos &&
              body.find("\"divergence_free_wrt_B\": true") != std::string::npos;
    return ok ? kExitOk : kExitCheckFailed;
  }

  if (hodge->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    FunctionHandle fh;
    load_function(gh.g, input_spec, samples, fh);
    char* report = nullptr;
    check(mgt_hodge_decompose(fh.f, &report));
    std::string body = take(report);
    std::cout << body;
    if (!output_dir.empty()) write_file(output_dir, "hodge.json", body);
    if (export_cycles) {
      char* csv = nullptr;
      check(mgt_cycle_basis_csv(gh.g, &csv));
      write_file(output_dir, "cycles.csv", take(csv));
    }
    return kExitOk;
  }

  if (dec->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    FunctionHandle fh;
    load_function(gh.g, input_spec, samples, fh);
    char* json = nullptr;
    check(mgt_key_decompose(gh.g, field.c_str(), fh.f, &json));
    std::string body = take(json);
    std::cout << body;
    if (!output_dir.empty()) write_file(output_dir, "decomposition.json", body);
    return kExitOk;
  }

  if (ibp->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    double worst = 0.0;
    if (random_n > 0) {
      for (int trial = 0; trial < random_n; ++trial) {
        FunctionHandle a, b;
        check(mgt_function_random_domain(gh.g, field.c_str(), seed + 2 * trial, &a.f));
        check(mgt_function_random_domain(gh.g, field.c_str(), seed + 2 * trial + 1, &b.f));
        double r = 0.0;
        check(mgt_ibp_residual(gh.g, field.c_str(), a.f, b.f, &r));
        worst = std::max(worst, r);
      }
    } else if (!f1_spec.empty() && !f2_spec.empty()) {
      FunctionHandle a, b;
      load_function(gh.g, f1_spec, samples, a);
      load_function(gh.g, f2_spec, samples, b);
      check(mgt_ibp_residual(gh.g, field.c_str(), a.f, b.f, &worst));
    } else {
      std::cerr << "error: give --f1/--f2 or --random N\n";
      return kExitUsage;
    }
    std::printf("ibp residual %.17g\n", worst);
    return worst <= 1e-9 ? kExitOk : kExitCheckFailed;
  }

  if (qchk->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    mgt_quadruple* q = nullptr;
    check(mgt_quadruple_build(gh.g, field.c_str(), &q));
    char* desc = nullptr;
    check(mgt_quadruple_describe(q, &desc));
    std::cout << take(desc);
    bool ok = true;
    if (!theta_csv.empty()) {
      ThetaHandle th;
      check(mgt_theta_from_csv(q, read_file(theta_csv).c_str(), &th.t));
      int is = 0;
      double sigma = 0.0;
      check(mgt_theta_check(q, th.t, &is, &sigma));
      std::printf("contraction: %s (sigma_max %.17g)\n", is ? "yes" : "no", sigma);
      ok = ok && is;
    }
    double worst = 0.0;
    int n = random_n > 0 ? random_n : 25;
    for (int trial = 0; trial < n; ++trial) {
      FunctionHandle a, b;
      check(mgt_function_random_domain(gh.g, field.c_str(), seed + 2 * trial, &a.f));
      check(mgt_function_random_domain(gh.g, field.c_str(), seed + 2 * trial + 1, &b.f));
      double r = 0.0;
      check(mgt_quadruple_identity_residual(q, a.f, b.f, &r));
      worst = std::max(worst, r);
    }
    std::printf("identity residual (worst of %d) %.17g\n", n, worst);
    mgt_quadruple_free(q);
    ok = ok && worst <= 1e-9;
    return ok ? kExitOk : kExitCheckFailed;
  }

  if (evolve->parsed()) {
    GraphHandle gh;
    load_graph(graph_spec, gh);
    FunctionHandle v0;
    load_function(gh.g, input_spec, samples, v0);
    mgt_trajectory* traj = nullptr;
    if (!rule_tag.empty()) {
      check(mgt_evolve_scattering(gh.g, field.c_str(), rule_tag.c_str(), rule_value, v0.f, dt, t_end,
                                  snapshots, &traj));
    } else {
      mgt_quadruple* q = nullptr;
      check(mgt_quadruple_build(gh.g, field.c_str(), &q));
      ThetaHandle th;
      if (!theta_csv.empty()) {
        check(mgt_theta_from_csv(q, read_file(theta_csv).c_str(), &th.t));
      } else if (!theta_tag.empty()) {
        check(mgt_theta_catalog(q, theta_tag.c_str(), theta_value, &th.t));
      } else {
        std::cerr << "error: give --theta, --theta-tag or --rule\n";
        mgt_quadruple_free(q);
        return kExitUsage;
      }
      if (lambda > 0.0) {
        mgt_function* sol = nullptr;
        double norm = 0.0;
        check(mgt_resolvent_solve(q, th.t, lambda, v0.f, samples, &sol, &norm));
        char* json = nullptr;
        check(mgt_function_to_json(sol, &json));
        std::string body = take(json);
        if (!output_dir.empty()) write_file(output_dir, "resolvent.json", body);
        std::printf("resolvent norm %.17g\n", norm);
        mgt_function_free(sol);
        mgt_quadruple_free(q);
        return kExitOk;
      }
      check(mgt_evolve_cn(q, th.t, v0.f, dt, t_end, snapshots, &traj));
      mgt_quadruple_free(q);
    }
    char* summary = nullptr;
    check(mgt_trajectory_summary(traj, &summary));
    std::string body = take(summary);
    std::cout << body;
    if (!output_dir.empty()) {
      write_file(output_dir, "trajectory_summary.json", body);
      char* csv = nullptr;
      check(mgt_trajectory_csv(traj, &csv));
      write_file(output_dir, "trajectory.csv", take(csv));
      if (svg) {
        char* pic = nullptr;
        check(mgt_trajectory_svg(traj, &pic));
        write_file(output_dir, "snapshot.svg", take(pic));
      }
    }
    mgt_trajectory_free(traj);
    return kExitOk;
  }

  if (sgb->parsed()) {
    mgt_graph* g = nullptr;
    check(mgt_graph_sierpinski(level, reduced ? 1 : 0, &g));
    char* json = nullptr;
    check(mgt_graph_to_json(g, &json));
    std::string body = take(json);
    if (!output_dir.empty()) write_file(output_dir, "sg_graph.json", body);
    else std::cout << body;
    mgt_graph_free(g);
    return kExitOk;
  }

  if (sgc->parsed()) {
    mgt_function* f = nullptr;
    check(mgt_sg_cylindrical(level, case_tag.c_str(), profile_tag.c_str(), t_eval, samples, &f));
    char* json = nullptr;
    check(mgt_function_to_json(f, &json));
    std::string body = take(json);
    if (!output_dir.empty()) write_file(output_dir, "cylindrical.json", body);
    else std::cout << body;
    mgt_function_free(f);
    return kExitOk;
  }

  if (sgv->parsed()) {
    char* csv = nullptr;
    check(mgt_sg_convergence_csv(case_tag.c_str(), profile_tag.c_str(), levels.data(),
                                 static_cast<int>(levels.size()), &csv));
    std::string body = take(csv);
    std::cout << body;
    if (!output_dir.empty()) write_file(output_dir, "convergence.csv", body);
    return kExitOk;
  }

  if (vall->parsed()) {
    if (fixtures != "builtin") {
      std::cerr << "error: only --fixtures builtin is available\n";
      return kExitUsage;
    }
    char* report = nullptr;
    int all = 0;
    check(mgt_verify_all(&report, &all));
    std::string body = take(report);
    // one line per criterion
    std::istringstream in(body);
    std::string line, name, detail;
    int id = 0;
    bool pass = false;
    while (std::getline(in, line)) {
      auto grab = [&](const char* key) {
        auto pos = line.find(key);
        if (pos == std::string::npos) return std::string();
        auto start = line.find(':', pos) + 2;
        std::string val = line.substr(start);
        if (!val.empty() && val.back() == ',') val.pop_back();
        if (val.size() >= 2 && val.front() == '"') val = val.substr(1, val.size() - 2);
        return val;
      };
      if (!grab("\"id\"").empty()) id = std::stoi(grab("\"id\""));
      if (!grab("\"name\"").empty()) name = grab("\"name\"");
      if (line.find("\"pass\"") != std::string::npos) pass = line.find("true") != std::string::npos;
      if (!grab("\"detail\"").empty()) {
        detail = grab("\"detail\"");
        std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                    detail.c_str());
      }
    }
    if (!output_dir.empty()) write_file(output_dir, "verify_report.json", body);
    std::printf("%s\n", all ? "ALL PASS" : "FAILURES");
    return all ? kExitOk : kExitCheckFailed;
  }

  return kExitUsage;
}
