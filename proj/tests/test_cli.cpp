#include "cclab/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using cclab::Json;

namespace {

struct Result {
  int code = -1;
  std::string err;
};

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "cclab_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const Json& j) {
  const fs::path p = workdir() / (name + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string(CCLAB_CLI_PATH) + " " + args + " 2> " + err.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

Result run(const std::string& cmd, const fs::path& config, const fs::path& out, const std::string& extra = "") {
  return run(cmd + " --config " + config.string() + " --out " + out.string() + " " + extra);
}

Json homogeneous_scenario(int n) {
  Json s = Json::parse(R"({"id": "homogeneous", "boundary": {"type": "normal_dot", "direction": [1, 0]},
                           "constants": {"alpha0": 1, "alpha1": 1, "ell0": 0.1}})");
  s["mesh"] = {{"nx", n}, {"ny", n}};
  return s;
}

Json disk_scenario(const std::string& id, double sigma, double zeta) {
  Json s = Json::parse(R"({"mesh": {"nx": 16},
     "inclusion": {"shape": {"type": "disk", "center": [0.5, 0.5], "radius": 0.15}},
     "constants": {"alpha0": 1, "alpha1": 4, "beta": 0.1, "delta": 0, "ell0": 0.1, "ell1": 0.02}})");
  s["id"] = id;
  s["inclusion"]["sigma"] = sigma;
  s["inclusion"]["zeta"] = zeta;
  return s;
}

Json error_of(const Result& r) { return Json::parse(r.err); }

}  // namespace

TEST_CASE("forward on a homogeneous background") {
  const fs::path out = workdir() / "forward";
  const auto r = run("forward", write_config("forward", {{"scenario", homogeneous_scenario(32)}}), out);
  REQUIRE(r.code == 0);
  const Json p = cclab::read_json_file(out / "power.json")["power"];
  CHECK(std::abs(p["W0"][0].get<double>() - 1.0) <= 1e-6);
  CHECK(p["dW"][0].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  for (const char* f : {"vertices.csv", "cells.csv", "u0.csv", "u1.csv", "grad_u0.csv", "grad_u1.csv"}) {
    CHECK(fs::exists(out / f));
  }
  CHECK(slurp(out / "u0.csv").rfind("id,x,y,re_u,im_u\n", 0) == 0);
}

TEST_CASE("error paths") {
  const fs::path out = workdir() / "errors";
  SUBCASE("inadmissible scenario") {
    const auto r = run("forward", write_config("inadm", {{"scenario", disk_scenario("neg", 0.5, 0.0)}}), out);
    CHECK(r.code == 2);
    CHECK(error_of(r)["error"] == "inadmissible-jump");
    CHECK(cclab::read_json_file(out / "error.json")["error"] == "inadmissible-jump");
  }
  SUBCASE("missing config") {
    const auto r = run("forward", workdir() / "nope.json", out);
    CHECK(r.code == 1);
    CHECK(error_of(r)["error"] == "io");
  }
  SUBCASE("malformed config") {
    const auto r = run("forward", write_config("bad", {{"scenario", {{"boundary", {{"type", "spiral"}}}}}}), out);
    CHECK(r.code == 1);
    CHECK(error_of(r)["error"] == "config");
  }
  SUBCASE("usage") {
    CHECK(run("").code == 1);
    CHECK(run("bogus").code == 1);
    CHECK(run("forward").code == 1);
    CHECK(run("forward --config x.json --threads 0").code == 1);
  }
  SUBCASE("generator needs a seed") {
    const auto r = run("gen", write_config("noseed", {{"ensemble", {{"count", 2}}}}), out);
    CHECK(r.code == 1);
    CHECK(error_of(r)["error"] == "config");
  }
}

TEST_CASE("verify") {
  const fs::path out = workdir() / "verify";
  SUBCASE("admissible ensemble") {
    const Json c{{"ensemble", {{"seed", 3}, {"count", 4}, {"ranges", {{"mesh_n", 16}}}}}, {"tolerance", 1e-6}};
    REQUIRE(run("verify", write_config("verify", c), out).code == 0);
    const Json v = cclab::read_json_file(out / "verify.json");
    CHECK(v["all_pass"].get<bool>());
    CHECK(v["count"] == 4);
    std::istringstream csv(slurp(out / "verify.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);
  }
  SUBCASE("negative jump is reported, not fatal") {
    const Json c{{"scenarios", {disk_scenario("a_ok", 1.0, -0.75), disk_scenario("b_neg", 0.5, 0.0)}}};
    REQUIRE(run("verify", write_config("verify_neg", c), out).code == 0);
    const Json v = cclab::read_json_file(out / "verify.json");
    CHECK(v["not_guaranteed"] == Json::array({"b_neg"}));
    CHECK(v["scenarios"][1]["inequality"] == "not guaranteed");
    CHECK(v["scenarios"][0]["inequality"] == "holds");
  }
  SUBCASE("empty ensemble") {
    const auto r = run("verify", write_config("verify_empty", {{"scenarios", Json::array()}}), out);
    CHECK(r.code == 1);
    CHECK(error_of(r)["error"] == "invalid-argument");
  }
}

TEST_CASE("threeball") {
  const fs::path out = workdir() / "threeball";
  Json scenario = homogeneous_scenario(32);
  scenario["boundary"] = {{"type", "saddle"}};
  Json c{{"scenario", scenario}, {"r0", 0.03}, {"r1", 0.06}, {"r2", 0.2}, {"grid", 5}};
  SUBCASE("25 centres") {
    REQUIRE(run("threeball", write_config("tb", c), out).code == 0);
    const Json s = cclab::read_json_file(out / "threeball.json");
    CHECK(s["rows"] == 25);
    CHECK(s["all_finite"].get<bool>());
    CHECK(s["all_window"].get<bool>());
    CHECK(s["all_s_above_k"].get<bool>());
    CHECK(s["max_over_min"].get<double>() <= 1e3);
  }
  SUBCASE("centre too close to the boundary") {
    c["centers"] = Json::array({{0.5, 0.5}, {0.1, 0.5}});
    REQUIRE(run("threeball", write_config("tb_skip", c), out).code == 0);
    const Json s = cclab::read_json_file(out / "threeball.json");
    CHECK(s["rows"] == 1);
    REQUIRE(s["skipped"].size() == 1);
    CHECK(s["skipped"][0]["reason"].get<std::string>().find("r2 exceeds") == 0);
  }
  SUBCASE("nonpositive s") {
    c["s"] = 0.0;
    const auto r = run("threeball", write_config("tb_s", c), out);
    CHECK(r.code == 1);
    CHECK(error_of(r)["error"] == "invalid-argument");
  }
}

TEST_CASE("smallness") {
  const fs::path out = workdir() / "smallness";
  const Json c{{"scenario", homogeneous_scenario(32)}, {"rho", 0.05}, {"grid", 5}};
  REQUIRE(run("smallness", write_config("small", c), out).code == 0);
  const Json s = cclab::read_json_file(out / "smallness.json");
  CHECK(s["radii"][0]["min_ratio"].get<double>() > 0.0);
  CHECK(slurp(out / "smallness.csv").rfind("x,y,rho,ratio\n", 0) == 0);
}

TEST_CASE("calibrate and estimate") {
  const fs::path out = workdir() / "calibrate";
  const Json c{{"ensemble", {{"seed", 7}, {"count", 20}, {"ranges", {{"mesh_n", 32}, {"fixed_material", true}}}}},
               {"test_count", 4}};
  REQUIRE(run("calibrate", write_config("cal", c), out).code == 0);
  const Json e = cclab::read_json_file(out / "estimates.json");
  CHECK(e["train_count"] == 16);
  CHECK(e["violations"] == 0);
  const Json cal = cclab::read_json_file(out / "calibration.json");
  CHECK(cal["sample_count"] == 16);
  CHECK(cal["K1"].get<double>() <= cal["K2"].get<double>());

  const fs::path est = workdir() / "estimate";
  SUBCASE("measurement with calibration") {
    const Json ec{{"calibration", (out / "calibration.json").string()},
                  {"measurement", {{"re_dW", 0.05}, {"re_W0", 1.0}}},
                  {"true_area", 0.05}};
    REQUIRE(run("estimate", write_config("est", ec), est).code == 0);
    const Json r = cclab::read_json_file(est / "estimate.json");
    CHECK(r["estimate"]["source"] == "analytic");
    CHECK(r.contains("bracketed"));
  }
  SUBCASE("user constants") {
    const Json ec{{"K1", 1.0}, {"K2", 2.0}, {"measurement", {{"re_dW", 0.05}, {"re_W0", 1.0}}}};
    REQUIRE(run("estimate", write_config("est_user", ec), est).code == 0);
    const Json r = cclab::read_json_file(est / "estimate.json");
    CHECK(r["estimate"]["lower"].get<double>() == doctest::Approx(0.05));
    CHECK(r["estimate"]["upper"].get<double>() == doctest::Approx(0.1));
    CHECK(r["estimate"]["source"] == "user");
  }
  SUBCASE("degenerate power") {
    const Json ec{{"K1", 1.0}, {"K2", 2.0}, {"measurement", {{"re_dW", 0.05}, {"re_W0", 0.0}}}};
    const auto r = run("estimate", write_config("est_zero", ec), est);
    CHECK(r.code == 2);
    CHECK(error_of(r)["error"] == "degenerate-power");
  }
  SUBCASE("reversed constants") {
    const Json ec{{"K1", 3.0}, {"K2", 2.0}, {"measurement", {{"re_dW", 0.05}, {"re_W0", 1.0}}}};
    const auto r = run("estimate", write_config("est_rev", ec), est);
    CHECK(r.code == 1);
    CHECK(error_of(r)["error"] == "invalid-argument");
  }
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  const Json c{{"ensemble", {{"count", 6}, {"ranges", {{"mesh_n", 16}}}}}, {"test_count", 2}};
  const fs::path cfg = write_config("det", c);
  const fs::path a = workdir() / "det_a";
  const fs::path b = workdir() / "det_b";
  REQUIRE(run("calibrate", cfg, a, "--seed 11 --threads 1").code == 0);
  REQUIRE(run("calibrate", cfg, b, "--seed 11 --threads 3").code == 0);
  for (const char* f : {"calibration.json", "ensemble.csv", "estimates.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const fs::path g1 = workdir() / "gen_a";
  const fs::path g2 = workdir() / "gen_b";
  const fs::path g3 = workdir() / "gen_c";
  REQUIRE(run("gen", cfg, g1, "--seed 11").code == 0);
  REQUIRE(run("gen", cfg, g2, "--seed 11").code == 0);
  REQUIRE(run("gen", cfg, g3, "--seed 12").code == 0);
  CHECK(slurp(g1 / "ensemble.json") == slurp(g2 / "ensemble.json"));
  CHECK(slurp(g1 / "ensemble.csv") == slurp(g2 / "ensemble.csv"));
  CHECK(slurp(g1 / "ensemble.json") != slurp(g3 / "ensemble.json"));
}
