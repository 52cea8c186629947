#include "cclab/scenario.hpp"

#include "cclab/error.hpp"
#include "cclab/power.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

namespace cclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void lower_margin(ConditionResult& r, double margin, Index cell) {
  if (margin < r.margin || !r.worst_cell) {
    r.margin = margin;
    r.worst_cell = cell;
  }
}

void finish(ConditionResult& r) { r.pass = !r.applicable || r.margin >= 0.0; }

Mat2 checked_inverse(const Mat2& m, Index cell) {
  const double det = m.determinant();
  const double scale = std::max(1.0, m.squaredNorm());
  if (!(std::abs(det) > 1e-14 * scale)) {
    throw Error(ErrorCode::SingularMaterial, "sigma1 + zeta1 is singular on cell " + std::to_string(cell));
  }
  return m.inverse();
}

}  // namespace

std::vector<complex> boundary_values(const Mesh& mesh, const BoundarySpec& spec) {
  const auto edges = mesh.boundary_edges();
  std::vector<complex> h(edges.size());
  switch (spec.kind) {
    case BoundarySpec::Kind::NormalDot:
      for (std::size_t e = 0; e < edges.size(); ++e) h[e] = spec.amplitude * spec.direction.dot(edges[e].normal);
      break;
    case BoundarySpec::Kind::Saddle:
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const Vec2& m = edges[e].midpoint;
        const Vec2 grad(2.0 * m.x(), -2.0 * m.y());
        h[e] = spec.amplitude * grad.dot(edges[e].normal);
      }
      break;
    case BoundarySpec::Kind::Alternating:
      for (std::size_t e = 0; e < edges.size(); ++e) h[e] = (e % 2 == 0) ? spec.amplitude : -spec.amplitude;
      break;
    case BoundarySpec::Kind::Edges:
      if (spec.values.size() != edges.size()) {
        throw Error(ErrorCode::InvalidArgument, "boundary table has " + std::to_string(spec.values.size()) +
                                                    " values for " + std::to_string(edges.size()) + " edges");
      }
      h = spec.values;
      break;
  }
  return h;
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) {
  const MeshSpec& ms = spec_.mesh;
  mesh_ = std::make_shared<const Mesh>(build_rect_mesh(ms.nx, ms.ny, ms.width, ms.height, ms.origin));
  const Index nc = mesh_->num_cells();

  const BackgroundSpec& bg = spec_.background;
  if (!bg.sigma_cells.empty() && static_cast<Index>(bg.sigma_cells.size()) != nc) {
    throw Error(ErrorCode::InvalidArgument, "sigma0 table size does not match cell count");
  }
  if (!bg.eps_cells.empty() && static_cast<Index>(bg.eps_cells.size()) != nc) {
    throw Error(ErrorCode::InvalidArgument, "eps0 table size does not match cell count");
  }
  background_.resize(nc);
  for (Index c = 0; c < nc; ++c) {
    Material& m = background_[c];
    m.sigma = bg.sigma_cells.empty() ? bg.sigma : bg.sigma_cells[c];
    m.eps = bg.eps_cells.empty() ? bg.eps : bg.eps_cells[c];
    m.zeta = SymTensor{};
    if (!m.sigma.is_finite() || !m.eps.is_finite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite background coefficient on cell " + std::to_string(c));
    }
  }

  perturbed_ = background_;
  in_inclusion_.assign(nc, 0);
  if (spec_.inclusion) {
    inclusion_.emplace(spec_.inclusion->shape);
    const Material& inner = spec_.inclusion->material;
    if (!inner.sigma.is_finite() || !inner.eps.is_finite() || !inner.zeta.is_finite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite inclusion coefficient");
    }
    for (Index c = 0; c < nc; ++c) {
      if (inclusion_->contains(mesh_->cell_centroid(c))) {
        in_inclusion_[c] = 1;
        inclusion_cells_.push_back(c);
        perturbed_[c] = inner;
      }
    }
  }

  h_ = boundary_values(*mesh_, spec_.boundary);
  const complex total = boundary_integral(*mesh_, std::span<const complex>(h_));
  double l1 = 0.0;
  for (std::size_t e = 0; e < h_.size(); ++e) l1 += std::abs(h_[e]) * mesh_->boundary_edges()[e].length;
  if (std::abs(total.real()) > 1e-12 * l1 || std::abs(total.imag()) > 1e-12 * l1) {
    throw Error(ErrorCode::IncompatibleData, "boundary data does not integrate to zero");
  }
}

AdmissibilityReport check_admissibility(const Scenario& scenario) {
  const Mesh& mesh = scenario.mesh();
  const Constants& k = scenario.constants();
  const auto bg = scenario.background();
  const auto pt = scenario.perturbed();
  AdmissibilityReport report;

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const Vec2 s0 = sym_eigenvalues(bg[c].sigma.matrix());
    const double bg_margin = std::min({s0[0] - 1.0 / k.alpha0, k.alpha0 - s0[1],
                                       k.alpha0 - spectral_norm_sym(bg[c].eps.matrix())});
    lower_margin(report.background_bounds, bg_margin, c);

    const Mat2 plus = pt[c].sigma.matrix() + pt[c].zeta.matrix();
    const Mat2 minus = pt[c].sigma.matrix() - pt[c].zeta.matrix();
    const Mat2 plus_inv = symmetrized(checked_inverse(plus, c));
    const double pt_margin =
        std::min({k.alpha1 - sym_eigenvalues(plus_inv)[1], k.alpha1 - sym_eigenvalues(minus)[1],
                  k.alpha1 - spectral_norm_sym(pt[c].eps.matrix())});
    lower_margin(report.perturbed_bounds, pt_margin, c);
  }

  const auto d_cells = scenario.inclusion_cells();
  report.jump.applicable = !d_cells.empty();
  report.jump_positivity.applicable = !d_cells.empty();
  report.eps_jump.applicable = k.delta.has_value();
  for (Index c : d_cells) {
    const Mat2 s0 = bg[c].sigma.matrix();
    const Mat2 plus = pt[c].sigma.matrix() + pt[c].zeta.matrix();
    const Mat2 minus = pt[c].sigma.matrix() - pt[c].zeta.matrix();
    const Mat2 m = symmetrized(Mat2(checked_inverse(plus, c) - s0.inverse()));
    const Mat2 n = minus - s0;
    lower_margin(report.jump, std::min(sym_eigenvalues(m)[0], sym_eigenvalues(n)[0]) - k.beta, c);

    const double eps_jump = spectral_norm_sym(pt[c].eps.matrix() - bg[c].eps.matrix());
    report.max_eps_jump = std::max(report.max_eps_jump, eps_jump);
    if (k.delta) lower_margin(report.eps_jump, *k.delta - eps_jump, c);

    const Mat4 diff = cg_block(pt[c]) - cg_block(bg[c]);
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat4>(symmetrized(diff), Eigen::EigenvaluesOnly).eigenvalues()[0];
    lower_margin(report.jump_positivity, lmin, c);
  }
  if (!d_cells.empty()) report.min_jump_eigenvalue = report.jump_positivity.margin;

  // Discrete Lipschitz quotient over cells sharing an edge.
  for (const auto& [c1, c2] : mesh.cell_adjacency()) {
    const double diff = std::sqrt((bg[c1].sigma.matrix() - bg[c2].sigma.matrix()).squaredNorm() +
                                  (bg[c1].eps.matrix() - bg[c2].eps.matrix()).squaredNorm());
    const double q = diff / (mesh.cell_centroid(c1) - mesh.cell_centroid(c2)).norm();
    if (q > report.lipschitz_estimate) {
      report.lipschitz_estimate = q;
      report.lipschitz.worst_cell = c1;
    }
  }
  report.lipschitz.margin = k.lipschitz - report.lipschitz_estimate;

  // Clearance: D stays l0 away from the boundary and no boundary cell is
  // perturbed, so gamma1 = gamma0 along the boundary.
  report.clearance.applicable = scenario.inclusion().has_value();
  if (scenario.inclusion()) {
    double dist = kInf;
    for (const Vec2& p : scenario.inclusion()->boundary_points()) {
      const double d = mesh.contains(p) ? mesh.distance_to_boundary(p) : -mesh.distance_to_boundary(p);
      dist = std::min(dist, d);
    }
    report.clearance.margin = dist - k.ell0;
    for (const auto& e : mesh.boundary_edges()) {
      if (scenario.in_inclusion(e.cell)) {
        report.clearance.margin = std::min(report.clearance.margin, -1.0);
        report.clearance.worst_cell = e.cell;
      }
    }
    double area = 0.0;
    double eroded = 0.0;
    for (Index c : scenario.inclusion_cells()) {
      area += mesh.cell_area(c);
      if (scenario.inclusion()->depth(mesh.cell_centroid(c)) > k.ell1) eroded += mesh.cell_area(c);
    }
    report.erosion_condition = eroded >= 0.5 * area;
  }

  for (ConditionResult* r : {&report.background_bounds, &report.perturbed_bounds, &report.jump, &report.eps_jump,
                             &report.lipschitz, &report.jump_positivity, &report.clearance}) {
    finish(*r);
  }
  return report;
}

void require_admissible(const AdmissibilityReport& report) {
  auto where = [](const ConditionResult& r) {
    return r.worst_cell ? " (cell " + std::to_string(*r.worst_cell) + ")" : std::string();
  };
  if (!report.jump.pass) {
    throw Error(ErrorCode::InadmissibleJump, "jump condition M, N >= beta fails" + where(report.jump));
  }
  if (!report.jump_positivity.pass) {
    throw Error(ErrorCode::InadmissibleJump, "B1 - B0 is not positive semi-definite" + where(report.jump_positivity));
  }
  if (!report.background_bounds.pass) {
    throw Error(ErrorCode::Inadmissible, "background bounds by alpha0 fail" + where(report.background_bounds));
  }
  if (!report.perturbed_bounds.pass) {
    throw Error(ErrorCode::Inadmissible, "perturbed bounds by alpha1 fail" + where(report.perturbed_bounds));
  }
  if (!report.eps_jump.pass) {
    throw Error(ErrorCode::Inadmissible, "permittivity jump exceeds delta" + where(report.eps_jump));
  }
  if (!report.lipschitz.pass) {
    throw Error(ErrorCode::Inadmissible, "background Lipschitz quotient exceeds L" + where(report.lipschitz));
  }
  if (!report.clearance.pass) {
    throw Error(ErrorCode::Inadmissible, "inclusion closer than l0 to the boundary" + where(report.clearance));
  }
}

ChiralCoefficients chiral_to_admittivity(const ChiralMedium& medium) {
  if (!(medium.rho > 0.0) || !(medium.rho_tilde > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "permittivity and permeability magnitudes must be positive");
  }
  const double k2 = medium.omega * medium.omega * medium.rho * medium.rho_tilde;
  const double beta2 = medium.chirality * medium.chirality;
  const double denom = 1.0 - k2 * beta2;
  if (!(denom > 0.0)) throw Error(ErrorCode::Resonance, "k^2 beta^2 >= 1");
  // Re of the principal root of mu/eps = (rho_tilde/rho) e^{2 i theta}.
  const double xi = std::sqrt(medium.rho_tilde / medium.rho) * std::cos(medium.theta);
  if (!(xi > 0.0)) throw Error(ErrorCode::InvalidArgument, "intrinsic impedance has non-positive real part");
  const double eta = k2 / denom;
  const complex eps = std::polar(medium.rho, -medium.theta);
  const complex linear = medium.omega * eps / denom;
  return {linear.real(), linear.imag(), eta * medium.chirality / xi, k2};
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// mt19937_64 is fully specified by the standard; the distribution layer is
/// not, so uniforms are drawn from raw bits.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double uniform(const Interval& i) { return uniform(i.lo, i.hi); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

Mat2 rotated_diag(double l1, double l2, double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return symmetrized(Mat2(r * Vec2(l1, l2).asDiagonal() * r.transpose()));
}

struct MaterialDraw {
  Material background;
  Material inclusion;
  double beta;
};

MaterialDraw draw_materials(Stream& rng, const EnsembleRanges& r) {
  for (int attempt = 0; attempt < r.max_attempts; ++attempt) {
    MaterialDraw d;
    const Mat2 s0 = rotated_diag(rng.uniform(r.sigma0_eigenvalues), rng.uniform(r.sigma0_eigenvalues),
                                 rng.uniform(0.0, std::numbers::pi));
    const Mat2 e0 = rotated_diag(rng.uniform(-r.eps0_max, r.eps0_max), rng.uniform(-r.eps0_max, r.eps0_max),
                                 rng.uniform(0.0, std::numbers::pi));
    d.beta = rng.uniform(r.beta);
    const Mat2 m = d.beta * Mat2::Identity() +
                   rotated_diag(rng.uniform(0.0, r.jump_extra), rng.uniform(0.0, r.jump_extra),
                                rng.uniform(0.0, std::numbers::pi));
    const Mat2 n = d.beta * Mat2::Identity() +
                   rotated_diag(rng.uniform(0.0, r.jump_extra), rng.uniform(0.0, r.jump_extra),
                                rng.uniform(0.0, std::numbers::pi));
    // sigma1 + zeta1 = (sigma0^-1 + M)^-1 and sigma1 - zeta1 = sigma0 + N,
    // which forces zeta1 negative definite.
    const Mat2 plus = symmetrized(Mat2((s0.inverse() + m).inverse()));
    const Mat2 minus = s0 + n;
    const Mat2 de = rotated_diag(rng.uniform(-r.eps_jump_max, r.eps_jump_max),
                                 rng.uniform(-r.eps_jump_max, r.eps_jump_max), rng.uniform(0.0, std::numbers::pi));
    d.background = {SymTensor::from_matrix(s0), SymTensor::from_matrix(e0), SymTensor{}};
    d.inclusion = {SymTensor::from_matrix(0.5 * (plus + minus)), SymTensor::from_matrix(e0 + de),
                   SymTensor::from_matrix(0.5 * (plus - minus))};
    const Mat4 diff = symmetrized(Mat4(cg_block(d.inclusion) - cg_block(d.background)));
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat4>(diff, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (lmin >= r.min_jump_eigenvalue) return d;
  }
  throw Error(ErrorCode::Generation, "no material draw with positive B1 - B0 within the attempt budget");
}

void validate(const EnsembleRanges& r) {
  auto ordered = [](const Interval& i) { return i.lo <= i.hi; };
  if (r.mesh_n < 2 || !ordered(r.area_fraction) || !ordered(r.beta) || !ordered(r.sigma0_eigenvalues) ||
      !ordered(r.aspect) || r.area_fraction.lo <= 0.0 || r.beta.lo <= 0.0 || r.sigma0_eigenvalues.lo <= 0.0 ||
      r.aspect.lo <= 0.0 || r.aspect.hi > 1.0 || r.shapes.empty() || r.max_attempts < 1 || r.ell0 < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "malformed ensemble ranges");
  }
  for (const auto& s : r.shapes) {
    if (s != "disk" && s != "ellipse") throw Error(ErrorCode::InvalidArgument, "unknown ensemble shape " + s);
  }
}

double tight_alpha0(const Material& bg) {
  const Vec2 ev = sym_eigenvalues(bg.sigma.matrix());
  return std::max({ev[1], 1.0 / ev[0], spectral_norm_sym(bg.eps.matrix())});
}

double tight_alpha1(const Material& m) {
  const Mat2 plus = m.sigma.matrix() + m.zeta.matrix();
  const Mat2 minus = m.sigma.matrix() - m.zeta.matrix();
  return std::max({sym_eigenvalues(symmetrized(Mat2(plus.inverse())))[1], sym_eigenvalues(minus)[1],
                   spectral_norm_sym(m.eps.matrix())});
}

}  // namespace

namespace {

struct Placement {
  std::string kind;
  double aspect = 1.0;
  double angle = 0.0;
  Vec2 unit_center{0.5, 0.5};  // position inside the admissible box, in [0, 1]^2
  double direction = 0.0;
  double phase = 0.0;
};

Placement draw_placement(Stream& rng, const EnsembleRanges& r) {
  Placement p;
  p.kind = r.shapes[rng.bits() % r.shapes.size()];
  if (p.kind != "disk") {
    p.aspect = rng.uniform(r.aspect);
    p.angle = rng.uniform(0.0, std::numbers::pi);
  }
  p.unit_center = Vec2(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
  p.direction = rng.uniform(0.0, 2.0 * std::numbers::pi);
  if (r.complex_boundary) p.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return p;
}

struct Footprint {
  Shape shape;
  Vec2 half;
  double min_axis;
};

Footprint footprint(const Placement& p, double area) {
  if (p.kind == "disk") {
    const double r = std::sqrt(area / std::numbers::pi);
    return {Disk{{0.0, 0.0}, r}, Vec2::Constant(r), r};
  }
  const double a = std::sqrt(area / (std::numbers::pi * p.aspect));
  const double b = p.aspect * a;
  const Vec2 half(std::hypot(a * std::cos(p.angle), b * std::sin(p.angle)),
                  std::hypot(a * std::sin(p.angle), b * std::cos(p.angle)));
  return {Ellipse{{0.0, 0.0}, a, b, p.angle}, half, b};
}

}  // namespace

ScenarioSpec generate_scenario_spec(std::uint64_t seed, int index, const EnsembleRanges& ranges) {
  validate(ranges);
  Stream rng(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(index) + 1)));
  Stream shared_rng(splitmix(seed));
  const MaterialDraw mat = draw_materials(ranges.fixed_material || ranges.vary_size_only ? shared_rng : rng, ranges);
  std::optional<Placement> shared;
  if (ranges.vary_size_only) shared = draw_placement(shared_rng, ranges);

  const double domain_area = 1.0;  // unit square
  for (int attempt = 0; attempt < ranges.max_attempts; ++attempt) {
    ScenarioSpec spec;
    char id[16];
    std::snprintf(id, sizeof(id), "s%04d", index);
    spec.id = id;
    spec.mesh = {ranges.mesh_n, ranges.mesh_n, 1.0, 1.0, {0.0, 0.0}};
    spec.background.sigma = mat.background.sigma;
    spec.background.eps = mat.background.eps;

    const double fraction = rng.uniform(ranges.area_fraction);
    const Placement place = shared ? *shared : draw_placement(rng, ranges);
    const Footprint fp = footprint(place, fraction * domain_area);
    // A shared placement must fit the largest inclusion of the range.
    const Vec2 reach = shared ? footprint(place, ranges.area_fraction.hi * domain_area).half : fp.half;
    const Vec2 lo = reach + Vec2::Constant(ranges.ell0);
    const Vec2 hi = Vec2::Ones() - lo;
    if (lo.x() >= hi.x() || lo.y() >= hi.y()) {
      if (shared) break;
      continue;
    }
    const Vec2 center = lo + place.unit_center.cwiseProduct(hi - lo);
    Shape shape = fp.shape;
    std::visit([&](auto& s) {
      if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, Polygon>) s.center = center;
    }, shape);
    spec.inclusion = InclusionSpec{shape, mat.inclusion};

    spec.boundary.kind = BoundarySpec::Kind::NormalDot;
    spec.boundary.direction = Vec2(std::cos(place.direction), std::sin(place.direction));
    spec.boundary.amplitude = std::polar(1.0, place.phase);

    spec.constants.alpha0 = tight_alpha0(mat.background) * (1.0 + 1e-6);
    spec.constants.alpha1 = std::max(tight_alpha1(mat.inclusion), tight_alpha1(mat.background)) * (1.0 + 1e-6);
    spec.constants.beta = mat.beta * (1.0 - 1e-9);
    spec.constants.delta = ranges.eps_jump_max;
    spec.constants.lipschitz = 0.0;
    spec.constants.ell0 = ranges.ell0;
    spec.constants.ell1 = ranges.ell1_factor * fp.min_axis;

    const Scenario scenario(spec);
    double cell_area = 0.0;
    for (Index c : scenario.inclusion_cells()) cell_area += scenario.mesh().cell_area(c);
    const double cell_fraction = cell_area / scenario.mesh().area();
    if (cell_fraction < ranges.area_fraction.lo || cell_fraction > ranges.area_fraction.hi) continue;
    const AdmissibilityReport report = check_admissibility(scenario);
    if (!report.erosion_condition || !report.admissible()) continue;
    return spec;
  }
  throw Error(ErrorCode::Generation, "scenario " + std::to_string(index) + " not admissible within attempt budget");
}

std::vector<Scenario> generate_ensemble(std::uint64_t seed, int count, const EnsembleRanges& ranges) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "negative ensemble count");
  std::vector<Scenario> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.emplace_back(generate_scenario_spec(seed, k, ranges));
  return out;
}

InclusionMeasure inclusion_measure(const Scenario& scenario) {
  InclusionMeasure m;
  if (!scenario.inclusion()) return m;
  const Inclusion& inc = *scenario.inclusion();
  const Mesh& mesh = scenario.mesh();
  const double ell = scenario.constants().ell1;
  m.exact_area = inc.area();
  m.eroded_exact = inc.eroded_area(ell);
  for (Index c : scenario.inclusion_cells()) {
    m.cell_area += mesh.cell_area(c);
    if (inc.depth(mesh.cell_centroid(c)) > ell) m.eroded_cells += mesh.cell_area(c);
  }
  m.erosion_condition = m.eroded_cells >= 0.5 * m.cell_area;
  return m;
}

}  // namespace cclab
