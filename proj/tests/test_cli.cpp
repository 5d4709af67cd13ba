// Drives the installed CLI binary end to end: exit codes, artifact files and
// byte determinism. The binary path arrives through the MGT_CLI environment
// variable set by CMake.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli() {
  const char* p = std::getenv("MGT_CLI");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args) {
  std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mgt_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int counter() {
    static int c = 0;
    return ++c;
  }
};

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("definitely-not-a-command") == 2);
  CHECK(run("graph validate") == 2);  // missing --graph
}

TEST_CASE("graph validate on builtins and documents") {
  CHECK(run("graph validate --graph builtin:interval") == 0);
  TempDir dir;
  CHECK(run("graph validate --graph builtin:sg1 --output " + dir.path.string()) == 0);
  CHECK(std::filesystem::exists(dir.path / "graph.json"));
  // round trip through the emitted document
  CHECK(run("graph validate --graph " + (dir.path / "graph.json").string()) == 0);
}

TEST_CASE("field check exit codes") {
  CHECK(run("field check --graph builtin:k1") == 0);
  TempDir dir;
  // a graph whose stored field is not divergence free at the center
  std::ofstream f(dir.path / "bad.json");
  f << R"({"vertices": ["a", "b", "c"],
           "edges": [{"id": "e1", "tail": "a", "head": "b"}, {"id": "e2", "tail": "b", "head": "c"}],
           "boundary": ["a", "c"],
           "fields": {"b": {"e1": 1.0, "e2": 2.0}}})";
  f.close();
  CHECK(run("field check --graph " + (dir.path / "bad.json").string()) == 1);
}

TEST_CASE("decompose and ibp sweeps") {
  TempDir dir;
  CHECK(run("decompose --graph builtin:circles --input bump:C1:0.2:0.8:1.0 --output " +
            dir.path.string()) == 1);  // a bump on one circle violates the domain condition
  CHECK(run("ibp-check --graph builtin:k1 --random 5") == 0);
  CHECK(run("quadruple check --graph builtin:star-tree --random 5") == 0);
}

TEST_CASE("theta csv through the CLI on a three-dimensional space") {
  TempDir dir;
  std::ofstream th(dir.path / "theta.csv");
  th << "3,3\n1,0,0\n0,1,0\n0,0,1\n";
  th.close();
  CHECK(run("quadruple check --graph builtin:k1 --theta " + (dir.path / "theta.csv").string() +
            " --random 5") == 0);
  std::ofstream bad(dir.path / "bad.csv");
  bad << "3,3\n2,0,0\n0,2,0\n0,0,2\n";
  bad.close();
  CHECK(run("quadruple check --graph builtin:k1 --theta " + (dir.path / "bad.csv").string() +
            " --random 5") == 1);
}

TEST_CASE("evolve writes deterministic artifacts") {
  TempDir a, b;
  std::string args =
      "evolve --graph builtin:circles-equal --rule circles-theta-bar --rule-value 1.0 "
      "--v0 bump:C1:0.25:0.75:1.0 --samples 128 --dt 0.0078125 --t-end 0.5 --snapshots 32 --svg";
  CHECK(run(args + " --output " + a.path.string()) == 0);
  CHECK(run(args + " --output " + b.path.string()) == 0);
  for (const char* name : {"trajectory.csv", "trajectory_summary.json", "snapshot.svg"}) {
    CHECK(std::filesystem::exists(a.path / name));
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}

TEST_CASE("cn evolution via catalog theta") {
  TempDir dir;
  CHECK(run("evolve --graph builtin:interval --theta-tag scalar --theta-value -1.0 "
            "--v0 bump:e:0.3:0.7:1.0 --samples 64 --dt 0.01 --t-end 0.2 --output " +
            dir.path.string()) == 0);
  CHECK(std::filesystem::exists(dir.path / "trajectory_summary.json"));
}

TEST_CASE("resolvent mode") {
  CHECK(run("evolve --graph builtin:interval --theta-tag zero --v0 bump:e:0.2:0.8:1.0 "
            "--samples 64 --lambda 2.0") == 0);
}

TEST_CASE("sg subcommands") {
  TempDir dir;
  CHECK(run("sg build --level 2 --reduced --output " + dir.path.string()) == 0);
  CHECK(std::filesystem::exists(dir.path / "sg_graph.json"));
  CHECK(run("sg cylindrical --level 2 --case degenerate --profile sine --t 0.25 --samples 32 --output " +
            dir.path.string()) == 0);
  CHECK(run("sg converge --case degenerate --profile sine --levels 1 2 3 --output " +
            dir.path.string()) == 0);
  CHECK(slurp(dir.path / "convergence.csv").rfind("level,", 0) == 0);
}
