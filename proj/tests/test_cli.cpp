#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "hsolve/sparse.hpp"

using namespace hsolve;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  json j;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  json j = out.str().empty() ? json(nullptr) : json::parse(out.str());
  return {code, j, err.str()};
}

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hsolve_test_cli";
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Drops every key whose name ends in "seconds" or "_per_iter".
json strip_timings(json j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string k = it.key();
      if (k.find("seconds") != std::string::npos) continue;
      out[k] = strip_timings(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(strip_timings(v));
    return out;
  }
  return j;
}

}  // namespace

TEST_CASE("generate aniso2d then solve it") {
  const std::string prefix = temp_dir() + "/aniso";
  const Outcome g = invoke({"generate", "aniso2d", "--n", "24", "--eps-aniso", "1e-3", "--out", prefix});
  REQUIRE(g.code == cli::kOk);
  CHECK(g.j["status"] == "ok");
  CHECK(g.j["report"]["n"] == 576);
  CHECK(std::filesystem::exists(prefix + ".mtx"));
  CHECK(std::filesystem::exists(prefix + ".coords"));

  const Outcome s = invoke({"solve", prefix + ".mtx", "--cluster-size", "16", "--stop-size", "64"});
  REQUIRE(s.code == cli::kOk);
  CHECK(s.j["status"] == "converged");
  for (const char* key : {"converged", "iterations", "residual_history", "final_relres", "factor_seconds",
                          "solve_seconds", "level_stats", "memory_estimate_bytes", "true_error"}) {
    CHECK(s.j["report"].contains(key));
  }
  CHECK(s.j["config"]["solver"]["deferred_compression"] == true);
  CHECK(s.j["config"]["coords"] == prefix + ".coords");
  CHECK(s.j["report"]["final_relres"].get<double>() <= 1e-12);
  CHECK(s.j["report"]["true_error"].get<double>() <= 1e-8);
  CHECK(!s.j["report"]["level_stats"].empty());
}

TEST_CASE("solve is deterministic apart from timings") {
  const std::string prefix = temp_dir() + "/det";
  REQUIRE(invoke({"generate", "aniso2d", "--n", "20", "--out", prefix}).code == cli::kOk);
  const std::vector<std::string> args{"solve", prefix + ".mtx", "random", "--seed", "3", "--cluster-size",
                                      "16", "--stop-size", "64"};
  const Outcome a = invoke(args), b = invoke(args);
  REQUIRE(a.code == cli::kOk);
  CHECK(strip_timings(a.j) == strip_timings(b.j));
  CHECK(a.j["report"]["true_error"].is_null());
}

TEST_CASE("identity matrix converges in one iteration") {
  const std::string path = temp_dir() + "/eye.mtx";
  save_matrix_market(SparseSpdMatrix::identity(10), path);
  for (const char* precond : {"hsolver", "ic0", "none"}) {
    const Outcome s = invoke({"solve", path, "--precond", precond});
    REQUIRE(s.code == cli::kOk);
    CHECK(s.j["report"]["iterations"] == 1);
  }
}

TEST_CASE("solve with an rhs file, gmres and extruded partitioner") {
  const std::string prefix = temp_dir() + "/ext";
  const Outcome g = invoke({"generate", "extruded3d", "--nx", "6", "--ny", "6", "--layers", "4", "--out", prefix});
  REQUIRE(g.code == cli::kOk);
  CHECK(std::filesystem::exists(prefix + ".colmap"));
  {
    std::ofstream rhs(prefix + ".rhs");
    for (int i = 0; i < 144; ++i) rhs << (i % 7) - 3 << '\n';
  }
  const Outcome s = invoke({"solve", prefix + ".mtx", prefix + ".rhs", "--colmap", prefix + ".colmap",
                            "--partitioner", "extruded", "--cluster-size", "16", "--stop-size", "32",
                            "--krylov", "gmres", "--restart", "20"});
  CHECK(s.code == cli::kOk);
  CHECK(s.j["config"]["solver"]["partitioner"] == "extruded");
}

TEST_CASE("maxit reached gives exit code 1") {
  const std::string prefix = temp_dir() + "/slow";
  REQUIRE(invoke({"generate", "aniso2d", "--n", "30", "--out", prefix}).code == cli::kOk);
  const Outcome s = invoke({"solve", prefix + ".mtx", "--precond", "none", "--maxit", "3"});
  CHECK(s.code == cli::kNotConverged);
  CHECK(s.j["status"] == "not_converged");
  CHECK(s.j["report"]["iterations"] == 3);
}

TEST_CASE("load and usage errors give exit code 2 with a typed error") {
  const Outcome missing = invoke({"solve", temp_dir() + "/nope.mtx"});
  CHECK(missing.code == cli::kFailure);
  CHECK(missing.j["error"]["type"] == "IoError");

  const std::string bad = temp_dir() + "/bad.mtx";
  std::ofstream(bad) << "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 x\n";
  const Outcome parse = invoke({"solve", bad});
  CHECK(parse.code == cli::kFailure);
  CHECK(parse.j["error"]["type"] == "ParseError");
  CHECK(parse.j["error"].contains("line"));

  const Outcome fam = invoke({"bench", "--family", "cube", "--sizes", "8"});
  CHECK(fam.code == cli::kFailure);

  const Outcome kind = invoke({"generate", "torus", "--out", temp_dir() + "/t"});
  CHECK(kind.code == cli::kFailure);

  const Outcome usage = invoke({"solve"});
  CHECK(usage.code == cli::kFailure);
  CHECK(usage.j["error"]["type"] == "UsageError");

  const Outcome unknown = invoke({"frobnicate"});
  CHECK(unknown.code == cli::kFailure);
}

TEST_CASE("verify suites") {
  const Outcome empty = invoke({"verify", "--suite", "all", "--trials", "0"});
  CHECK(empty.code == cli::kOk);
  CHECK(empty.j["status"] == "passed");

  const Outcome props = invoke({"verify", "--suite", "props", "--trials", "5"});
  CHECK(props.code == cli::kOk);
  CHECK(props.j["report"]["props"]["experiments"] == 40);
  CHECK(props.j["report"]["props"]["bound_failures"] == 0);

  const Outcome ex = invoke({"verify", "--suite", "exactness", "--trials", "1"});
  CHECK(ex.code == cli::kOk);
  CHECK(ex.j["report"]["exactness"]["cases"].size() == 2);

  CHECK(invoke({"verify", "--suite", "everything"}).code == cli::kFailure);
}

TEST_CASE("bench reports rows and exponents") {
  const Outcome b = invoke({"bench", "--family", "aniso2d", "--sizes", "16,24", "--cluster-size", "16",
                            "--stop-size", "64"});
  REQUIRE(b.code == cli::kOk);
  CHECK(b.j["report"]["rows"].size() == 2);
  CHECK(b.j["report"]["exponents_defined"] == true);

  const Outcome c = invoke({"bench", "--family", "extruded3d", "--sizes", "4", "--layers", "4",
                            "--cluster-size", "16", "--stop-size", "32", "--compare-dc"});
  REQUIRE(c.code == cli::kOk);
  CHECK(c.j["report"].contains("dc_on"));
  CHECK(c.j["report"].contains("dc_off"));
  CHECK(c.j["report"]["dc_on"]["exponents_defined"] == false);
}

TEST_CASE("the installed executable runs as a separate process") {
  const char* exe = std::getenv("HSOLVE_EXE");
  if (exe == nullptr) return;
  const std::string prefix = temp_dir() + "/proc";
  const std::string gen = std::string(exe) + " generate aniso2d --n 8 --out " + prefix + " > /dev/null";
  CHECK(std::system(gen.c_str()) == 0);
  const std::string bad = std::string(exe) + " solve " + prefix + ".missing > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == cli::kFailure);
}

TEST_CASE("load_vector") {
  const std::string path = temp_dir() + "/v.txt";
  std::ofstream(path) << "% header\n1 2\n3\n";
  const Vector v = cli::load_vector(path);
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 3.0);
}
