#include "cclab/io.hpp"

#include "cclab/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cclab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Config, what); }

Vec2 vec2(const Json& j, const char* name) {
  if (!j.is_array() || j.size() != 2) bad(std::string(name) + " must be a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json vec2(const Vec2& v) { return Json::array({v.x(), v.y()}); }

SymTensor tensor(const Json& j, const char* name) {
  if (j.is_number()) return SymTensor::isotropic(j.get<double>());
  if (!j.is_array() || j.size() != 3) bad(std::string(name) + " must be a scalar or [a11, a12, a22]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json tensor(const SymTensor& t) { return Json::array({t.a11, t.a12, t.a22}); }

complex cplx(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad("complex values are numbers or [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json cplx(const complex& z) { return Json::array({z.real(), z.imag()}); }

Interval interval(const Json& j, const char* name) {
  const Vec2 v = vec2(j, name);
  return {v.x(), v.y()};
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json condition(const ConditionResult& r) {
  Json j;
  j["applicable"] = r.applicable;
  j["pass"] = r.pass;
  j["margin"] = r.applicable ? finite_or_null(r.margin) : Json(nullptr);
  j["worst_cell"] = r.worst_cell ? Json(*r.worst_cell) : Json(nullptr);
  return j;
}

Json range(const Range& r) { return Json::array({r.lo, r.hi}); }
Range range(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

ScenarioSpec scenario_from_json(const Json& j) {
  try {
    ScenarioSpec s;
    s.id = j.value("id", std::string("scenario"));
    if (j.contains("mesh")) {
      const Json& m = j["mesh"];
      s.mesh.nx = m.value("nx", 32);
      s.mesh.ny = m.value("ny", s.mesh.nx);
      s.mesh.width = m.value("width", 1.0);
      s.mesh.height = m.value("height", 1.0);
      if (m.contains("origin")) s.mesh.origin = vec2(m["origin"], "mesh.origin");
    }
    if (j.contains("background")) {
      const Json& b = j["background"];
      if (b.contains("sigma")) s.background.sigma = tensor(b["sigma"], "background.sigma");
      if (b.contains("eps")) s.background.eps = tensor(b["eps"], "background.eps");
      if (b.contains("sigma_cells")) {
        for (const Json& t : b["sigma_cells"]) s.background.sigma_cells.push_back(tensor(t, "sigma_cells"));
      }
      if (b.contains("eps_cells")) {
        for (const Json& t : b["eps_cells"]) s.background.eps_cells.push_back(tensor(t, "eps_cells"));
      }
    }
    if (j.contains("inclusion") && !j["inclusion"].is_null()) {
      const Json& inc = j["inclusion"];
      const Json& shape = inc.at("shape");
      const std::string type = shape.at("type").get<std::string>();
      InclusionSpec spec;
      if (type == "disk") {
        spec.shape = Disk{vec2(shape.at("center"), "center"), shape.at("radius").get<double>()};
      } else if (type == "ellipse") {
        const Vec2 axes = vec2(shape.at("semi_axes"), "semi_axes");
        spec.shape = Ellipse{vec2(shape.at("center"), "center"), axes.x(), axes.y(), shape.value("angle", 0.0)};
      } else if (type == "polygon") {
        Polygon p;
        for (const Json& v : shape.at("vertices")) p.vertices.push_back(vec2(v, "vertex"));
        spec.shape = p;
      } else {
        bad("unknown inclusion shape '" + type + "'");
      }
      if (inc.contains("sigma")) spec.material.sigma = tensor(inc["sigma"], "inclusion.sigma");
      if (inc.contains("eps")) spec.material.eps = tensor(inc["eps"], "inclusion.eps");
      if (inc.contains("zeta")) spec.material.zeta = tensor(inc["zeta"], "inclusion.zeta");
      s.inclusion = spec;
    }
    if (j.contains("boundary")) {
      const Json& b = j["boundary"];
      const std::string type = b.value("type", std::string("normal_dot"));
      if (type == "normal_dot") {
        s.boundary.kind = BoundarySpec::Kind::NormalDot;
      } else if (type == "saddle") {
        s.boundary.kind = BoundarySpec::Kind::Saddle;
      } else if (type == "alternating") {
        s.boundary.kind = BoundarySpec::Kind::Alternating;
      } else if (type == "edges") {
        s.boundary.kind = BoundarySpec::Kind::Edges;
        for (const Json& v : b.at("values")) s.boundary.values.push_back(cplx(v));
      } else {
        bad("unknown boundary type '" + type + "'");
      }
      if (b.contains("direction")) s.boundary.direction = vec2(b["direction"], "boundary.direction");
      if (b.contains("amplitude")) s.boundary.amplitude = cplx(b["amplitude"]);
    }
    if (j.contains("constants")) {
      const Json& k = j["constants"];
      s.constants.alpha0 = k.value("alpha0", 1.0);
      s.constants.alpha1 = k.value("alpha1", 1.0);
      s.constants.beta = k.value("beta", 0.0);
      if (k.contains("delta") && !k["delta"].is_null()) s.constants.delta = k["delta"].get<double>();
      s.constants.lipschitz = k.value("L", 0.0);
      s.constants.ell0 = k.value("ell0", 0.0);
      s.constants.ell1 = k.value("ell1", 0.0);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed scenario: ") + e.what());
  }
}

Json to_json(const ScenarioSpec& s) {
  Json j;
  j["id"] = s.id;
  j["mesh"] = {{"nx", s.mesh.nx}, {"ny", s.mesh.ny}, {"width", s.mesh.width}, {"height", s.mesh.height},
               {"origin", vec2(s.mesh.origin)}};
  Json bg;
  bg["sigma"] = tensor(s.background.sigma);
  bg["eps"] = tensor(s.background.eps);
  if (!s.background.sigma_cells.empty()) {
    bg["sigma_cells"] = Json::array();
    for (const auto& t : s.background.sigma_cells) bg["sigma_cells"].push_back(tensor(t));
  }
  if (!s.background.eps_cells.empty()) {
    bg["eps_cells"] = Json::array();
    for (const auto& t : s.background.eps_cells) bg["eps_cells"].push_back(tensor(t));
  }
  j["background"] = bg;
  if (s.inclusion) {
    Json shape = std::visit(
        overloaded{
            [](const Disk& d) { return Json{{"type", "disk"}, {"center", vec2(d.center)}, {"radius", d.radius}}; },
            [](const Ellipse& e) {
              return Json{{"type", "ellipse"},
                          {"center", vec2(e.center)},
                          {"semi_axes", Json::array({e.semi_major, e.semi_minor})},
                          {"angle", e.angle}};
            },
            [](const Polygon& p) {
              Json v = Json::array();
              for (const Vec2& q : p.vertices) v.push_back(vec2(q));
              return Json{{"type", "polygon"}, {"vertices", v}};
            },
        },
        s.inclusion->shape);
    j["inclusion"] = {{"shape", shape},
                      {"sigma", tensor(s.inclusion->material.sigma)},
                      {"eps", tensor(s.inclusion->material.eps)},
                      {"zeta", tensor(s.inclusion->material.zeta)}};
  } else {
    j["inclusion"] = nullptr;
  }
  Json b;
  switch (s.boundary.kind) {
    case BoundarySpec::Kind::NormalDot: b["type"] = "normal_dot"; break;
    case BoundarySpec::Kind::Saddle: b["type"] = "saddle"; break;
    case BoundarySpec::Kind::Alternating: b["type"] = "alternating"; break;
    case BoundarySpec::Kind::Edges: {
      b["type"] = "edges";
      Json values = Json::array();
      for (const complex& z : s.boundary.values) values.push_back(cplx(z));
      b["values"] = values;
      break;
    }
  }
  b["direction"] = vec2(s.boundary.direction);
  b["amplitude"] = cplx(s.boundary.amplitude);
  j["boundary"] = b;
  j["constants"] = {{"alpha0", s.constants.alpha0}, {"alpha1", s.constants.alpha1}, {"beta", s.constants.beta},
                    {"delta", opt(s.constants.delta)},   {"L", s.constants.lipschitz},    {"ell0", s.constants.ell0},
                    {"ell1", s.constants.ell1}};
  return j;
}

EnsembleRanges ranges_from_json(const Json& j) {
  try {
    EnsembleRanges r;
    r.mesh_n = j.value("mesh_n", r.mesh_n);
    if (j.contains("area_fraction")) r.area_fraction = interval(j["area_fraction"], "area_fraction");
    if (j.contains("beta")) r.beta = interval(j["beta"], "beta");
    if (j.contains("sigma0_eigenvalues")) r.sigma0_eigenvalues = interval(j["sigma0_eigenvalues"], "sigma0_eigenvalues");
    r.eps0_max = j.value("eps0_max", r.eps0_max);
    r.jump_extra = j.value("jump_extra", r.jump_extra);
    r.eps_jump_max = j.value("eps_jump_max", r.eps_jump_max);
    r.ell0 = j.value("ell0", r.ell0);
    r.ell1_factor = j.value("ell1_factor", r.ell1_factor);
    if (j.contains("aspect")) r.aspect = interval(j["aspect"], "aspect");
    if (j.contains("shapes")) r.shapes = j["shapes"].get<std::vector<std::string>>();
    r.fixed_material = j.value("fixed_material", r.fixed_material);
    r.vary_size_only = j.value("vary_size_only", r.vary_size_only);
    r.complex_boundary = j.value("complex_boundary", r.complex_boundary);
    r.min_jump_eigenvalue = j.value("min_jump_eigenvalue", r.min_jump_eigenvalue);
    r.max_attempts = j.value("max_attempts", r.max_attempts);
    return r;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed ensemble ranges: ") + e.what());
  }
}

Json to_json(const EnsembleRanges& r) {
  return Json{{"mesh_n", r.mesh_n},
              {"area_fraction", Json::array({r.area_fraction.lo, r.area_fraction.hi})},
              {"beta", Json::array({r.beta.lo, r.beta.hi})},
              {"sigma0_eigenvalues", Json::array({r.sigma0_eigenvalues.lo, r.sigma0_eigenvalues.hi})},
              {"eps0_max", r.eps0_max},
              {"jump_extra", r.jump_extra},
              {"eps_jump_max", r.eps_jump_max},
              {"ell0", r.ell0},
              {"ell1_factor", r.ell1_factor},
              {"aspect", Json::array({r.aspect.lo, r.aspect.hi})},
              {"shapes", r.shapes},
              {"fixed_material", r.fixed_material},
              {"vary_size_only", r.vary_size_only},
              {"complex_boundary", r.complex_boundary},
              {"min_jump_eigenvalue", r.min_jump_eigenvalue},
              {"max_attempts", r.max_attempts}};
}

Json to_json(const AdmissibilityReport& r) {
  Json j;
  j["admissible"] = r.admissible();
  j["background_bounds"] = condition(r.background_bounds);
  j["perturbed_bounds"] = condition(r.perturbed_bounds);
  j["jump"] = condition(r.jump);
  j["eps_jump"] = condition(r.eps_jump);
  j["lipschitz"] = condition(r.lipschitz);
  j["jump_positivity"] = condition(r.jump_positivity);
  j["clearance"] = condition(r.clearance);
  j["lipschitz_estimate"] = r.lipschitz_estimate;
  j["max_eps_jump"] = r.max_eps_jump;
  j["min_jump_eigenvalue"] = opt(r.min_jump_eigenvalue);
  j["erosion_condition"] = r.erosion_condition;
  return j;
}

Json to_json(const PowerReport& r) {
  Json j;
  j["W"] = cplx(r.w);
  j["W0"] = cplx(r.w0);
  j["dW"] = cplx(r.gap);
  j["re_dW"] = r.re_gap;
  j["re_W0"] = r.re_w0;
  j["hermitian_W"] = r.hermitian_w;
  j["hermitian_W0"] = r.hermitian_w0;
  j["inclusion_energy"] = r.inclusion_energy;
  Json basic = Json::array();
  const char* pairs[4] = {"00", "01", "10", "11"};
  for (int i = 0; i < 4; ++i) {
    basic.push_back({{"pair", pairs[i]},
                     {"volume", r.basic[i].volume},
                     {"boundary", r.basic[i].boundary},
                     {"residual", r.basic[i].residual}});
  }
  j["basic_identity"] = basic;
  j["gap_identity"] = {{"re_dW", r.identity.re_gap},         {"line1", r.identity.line1},
                       {"line2", r.identity.line2},          {"residual1", r.identity.residual1},
                       {"residual2", r.identity.residual2},  {"cross_residual", r.identity.cross_residual}};
  j["C1"] = r.c1;
  j["C2"] = r.c2;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["lower_holds"] = r.lower_holds;
  j["upper_holds"] = r.upper_holds;
  j["guaranteed"] = r.guaranteed;
  j["jump_lambda_min"] = opt(r.jump_lambda_min);
  j["jump_lambda_max"] = opt(r.jump_lambda_max);
  return j;
}

Json to_json(const SizeEstimate& e) {
  return Json{{"ratio", e.ratio},
              {"lower", e.lower},
              {"upper", e.upper},
              {"K1", e.k1},
              {"K2", e.k2},
              {"source", to_string(e.source)},
              {"negative_ratio", e.negative_ratio},
              {"upper_supported", e.upper_supported},
              {"extrapolated", e.extrapolated}};
}

Json to_json(const Calibration& c) {
  Json hashes = Json::array();
  for (auto h : c.hashes) hashes.push_back(hex(h));
  const auto& d = c.descriptor;
  return Json{{"K1", c.k1},
              {"K2", c.k2},
              {"sample_count", c.sample_count},
              {"analytic_K1", opt(c.analytic_k1)},
              {"analytic_K2", opt(c.analytic_k2)},
              {"descriptor",
               {{"alpha0", range(d.alpha0)},
                {"alpha1", range(d.alpha1)},
                {"beta", range(d.beta)},
                {"ell0", range(d.ell0)},
                {"ell1", range(d.ell1)},
                {"h_ratio", range(d.h_ratio)},
                {"mesh_n", Json::array({d.mesh_n_min, d.mesh_n_max})},
                {"boundary_kinds", d.boundary_kinds}}},
              {"ids", c.ids},
              {"scenario_hashes", hashes},
              {"excluded", c.excluded}};
}

Calibration calibration_from_json(const Json& j) {
  try {
    Calibration c;
    c.k1 = j.at("K1").get<double>();
    c.k2 = j.at("K2").get<double>();
    c.sample_count = j.value("sample_count", std::size_t{0});
    if (j.contains("analytic_K1") && !j["analytic_K1"].is_null()) c.analytic_k1 = j["analytic_K1"].get<double>();
    if (j.contains("analytic_K2") && !j["analytic_K2"].is_null()) c.analytic_k2 = j["analytic_K2"].get<double>();
    if (j.contains("descriptor")) {
      const Json& d = j["descriptor"];
      c.descriptor.alpha0 = range(d.at("alpha0"));
      c.descriptor.alpha1 = range(d.at("alpha1"));
      c.descriptor.beta = range(d.at("beta"));
      c.descriptor.ell0 = range(d.at("ell0"));
      c.descriptor.ell1 = range(d.at("ell1"));
      c.descriptor.h_ratio = range(d.at("h_ratio"));
      c.descriptor.mesh_n_min = d.at("mesh_n").at(0).get<int>();
      c.descriptor.mesh_n_max = d.at("mesh_n").at(1).get<int>();
      c.descriptor.boundary_kinds = d.at("boundary_kinds").get<std::vector<std::string>>();
    }
    if (j.contains("ids")) c.ids = j["ids"].get<std::vector<std::string>>();
    if (j.contains("excluded")) c.excluded = j["excluded"].get<std::vector<std::string>>();
    if (j.contains("scenario_hashes")) {
      for (const Json& h : j["scenario_hashes"]) c.hashes.push_back(std::stoull(h.get<std::string>(), nullptr, 16));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed calibration: ") + e.what());
  }
}

Json to_json(const ThreeBallReport& r) {
  return Json{{"center", vec2(r.center)}, {"r0", r.r0},       {"r1", r.r1},   {"r2", r.r2},
              {"lambda", r.lambda},       {"s", r.s},         {"K", r.k},     {"R", r.big_r},
              {"tau", r.tau},             {"n0", r.n0},       {"n1", r.n1},   {"n2", r.n2},
              {"c_hat", finite_or_null(r.c_hat)}, {"window", r.window}, {"s_above_k", r.s_above_k},
              {"degenerate", r.degenerate}};
}

Json to_json(const InclusionMeasure& m) {
  return Json{{"exact_area", m.exact_area},
              {"cell_area", m.cell_area},
              {"eroded_exact", m.eroded_exact},
              {"eroded_cells", m.eroded_cells},
              {"erosion_condition", m.erosion_condition}};
}

std::uint64_t scenario_hash(const ScenarioSpec& spec) {
  const std::string text = to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace cclab
