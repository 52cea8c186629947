#include "cclab/continuation.hpp"
#include "cclab/error.hpp"
#include "cclab/io.hpp"
#include "cclab/pipeline.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cclab;

// Structured values cross the boundary as JSON text; the Python side wraps
// them with the json module.

namespace {

Scenario scenario_of(const std::string& text) { return Scenario(scenario_from_json(Json::parse(text))); }

std::string forward(const std::string& scenario_json) {
  const Scenario sc = scenario_of(scenario_json);
  ScenarioRun run;
  {
    py::gil_scoped_release release;
    run = run_scenario(sc);
  }
  Json u0 = Json::array();
  Json u1 = Json::array();
  for (const complex& z : run.u0.values) u0.push_back({z.real(), z.imag()});
  for (const complex& z : run.u1.values) u1.push_back({z.real(), z.imag()});
  return Json{{"id", sc.id()},
              {"hash", hex(run.hash)},
              {"admissibility", to_json(run.admissibility)},
              {"power", to_json(run.power)},
              {"u0", u0},
              {"u1", u1}}
      .dump();
}

std::string generate(std::uint64_t seed, int count, const std::string& ranges_json) {
  Json out = Json::array();
  for (int i = 0; i < count; ++i) {
    out.push_back(to_json(generate_scenario_spec(seed, i, ranges_from_json(Json::parse(ranges_json)))));
  }
  return out.dump();
}

std::string calibrate_json(const std::string& scenarios_json, int threads) {
  std::vector<Scenario> scenarios;
  for (const Json& s : Json::parse(scenarios_json)) scenarios.emplace_back(scenario_from_json(s));
  std::vector<CalibrationSample> samples;
  {
    py::gil_scoped_release release;
    samples = calibration_samples(scenarios, run_ensemble(scenarios, threads));
  }
  return to_json(calibrate(samples)).dump();
}

std::string estimate(double re_gap, double re_w0, double k1, double k2) {
  return to_json(estimate_size(re_gap, re_w0, k1, k2)).dump();
}

std::string three_ball(const std::string& scenario_json, std::pair<double, double> center, double r0, double r1,
                       double r2, double s) {
  const Scenario sc = scenario_of(scenario_json);
  const ComplexField u = solve_neumann(assemble(sc, Problem::Background));
  ThreeBallParams p;
  p.center = {center.first, center.second};
  p.r0 = r0;
  p.r1 = r1;
  p.r2 = r2;
  p.s = s;
  p.lambda = ellipticity(sc);
  p.lipschitz = sc.constants().lipschitz;
  return to_json(three_ball_check(u, p)).dump();
}

std::string smallness(const std::string& scenario_json, double rho, int grid) {
  const Scenario sc = scenario_of(scenario_json);
  const ComplexField u = solve_neumann(assemble(sc, Problem::Background));
  const SmallnessReport r = smallness_chain(u, rho, sample_grid(sc.mesh(), grid));
  Json samples = Json::array();
  for (const Vec2& x : r.samples) samples.push_back({x.x(), x.y()});
  return Json{{"rho", r.rho}, {"samples", samples}, {"ratios", r.ratios}, {"min_ratio", r.min_ratio}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Complex conductivity laboratory core";
  py::register_exception<cclab::Error>(m, "CoreError", PyExc_RuntimeError);
  m.def("forward", &forward, py::arg("scenario_json"));
  m.def("generate", &generate, py::arg("seed"), py::arg("count"), py::arg("ranges_json"));
  m.def("calibrate", &calibrate_json, py::arg("scenarios_json"), py::arg("threads") = 1);
  m.def("estimate_size", &estimate, py::arg("re_dw"), py::arg("re_w0"), py::arg("k1"), py::arg("k2"));
  m.def("tau", &tau, py::arg("r0"), py::arg("r1"), py::arg("r2"), py::arg("lam"), py::arg("s"));
  m.def("three_ball", &three_ball, py::arg("scenario_json"), py::arg("center"), py::arg("r0"), py::arg("r1"),
        py::arg("r2"), py::arg("s") = 0.0);
  m.def("smallness", &smallness, py::arg("scenario_json"), py::arg("rho"), py::arg("grid") = 9);
  m.def("scenario_hash", [](const std::string& s) { return hex(scenario_hash(scenario_from_json(Json::parse(s)))); });
}
