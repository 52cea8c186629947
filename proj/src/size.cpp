#include "cclab/size.hpp"

#include "cclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cclab {

std::string to_string(ConstantSource source) {
  switch (source) {
    case ConstantSource::Calibrated: return "calibrated";
    case ConstantSource::Analytic: return "analytic";
    case ConstantSource::User: return "user";
  }
  return "unknown";
}

SizeEstimate estimate_size(double re_gap, double re_w0, double k1, double k2, ConstantSource source) {
  if (!(re_w0 > 0.0)) throw Error(ErrorCode::DegeneratePower, "Re W0 must be positive");
  if (!(k1 >= 0.0) || !(k2 >= 0.0) || k1 > k2) {
    throw Error(ErrorCode::InvalidArgument, "constants must satisfy 0 <= K1 <= K2");
  }
  SizeEstimate e;
  e.ratio = re_gap / re_w0;
  e.k1 = k1;
  e.k2 = k2;
  e.lower = k1 * e.ratio;
  e.upper = k2 * e.ratio;
  e.source = source;
  e.negative_ratio = e.ratio < 0.0;
  return e;
}

double h_norm_ratio(std::span<const complex> h, const Mesh& mesh) {
  const auto edges = mesh.boundary_edges();
  if (h.size() != edges.size()) throw Error(ErrorCode::InvalidArgument, "one boundary value per edge expected");
  double l2 = 0.0;
  for (std::size_t e = 0; e < h.size(); ++e) l2 += std::norm(h[e]) * edges[e].length;
  if (!(l2 > 0.0)) throw Error(ErrorCode::DegenerateData, "boundary data vanishes");

  const double kernel = -0.5 / std::numbers::pi;
  double q = 0.0;
  for (std::size_t a = 0; a < h.size(); ++a) {
    const double la = edges[a].length;
    q += la * la * kernel * (std::log(la) - 1.5) * std::norm(h[a]);
    for (std::size_t b = a + 1; b < h.size(); ++b) {
      const double g = kernel * std::log((edges[a].midpoint - edges[b].midpoint).norm());
      q += 2.0 * la * edges[b].length * g * (h[a] * std::conj(h[b])).real();
    }
  }
  if (!(q > 0.0)) throw Error(ErrorCode::DegenerateData, "negative-order norm surrogate is not positive");
  return std::sqrt(l2) / std::sqrt(q);
}

namespace {

std::string boundary_kind_name(BoundarySpec::Kind kind) {
  switch (kind) {
    case BoundarySpec::Kind::NormalDot: return "normal_dot";
    case BoundarySpec::Kind::Saddle: return "saddle";
    case BoundarySpec::Kind::Alternating: return "alternating";
    case BoundarySpec::Kind::Edges: return "edges";
  }
  return "unknown";
}

void widen(Range& r, double v, bool first) {
  if (first) {
    r = {v, v};
  } else {
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
}

}  // namespace

CalibrationSample make_sample(const Scenario& scenario, const ComplexField& u0, const PowerReport& power,
                              std::uint64_t hash) {
  const Mesh& mesh = scenario.mesh();
  const Constants& k = scenario.constants();
  CalibrationSample s;
  s.id = scenario.id();
  s.hash = hash;
  for (Index c : scenario.inclusion_cells()) s.area += mesh.cell_area(c);
  s.re_gap = power.re_gap;
  s.re_w0 = power.re_w0;
  s.alpha0 = k.alpha0;
  s.alpha1 = k.alpha1;
  s.beta = k.beta;
  s.ell0 = k.ell0;
  s.ell1 = k.ell1;
  s.mesh_n = std::max(scenario.spec().mesh.nx, scenario.spec().mesh.ny);
  s.boundary_kind = boundary_kind_name(scenario.spec().boundary.kind);
  s.h_ratio = h_norm_ratio(scenario.boundary_data(), mesh);

  double area = 0.0, eroded = 0.0;
  if (scenario.inclusion()) {
    for (Index c : scenario.inclusion_cells()) {
      area += mesh.cell_area(c);
      if (scenario.inclusion()->depth(mesh.cell_centroid(c)) > k.ell1) eroded += mesh.cell_area(c);
    }
  }
  s.erosion_condition = eroded >= 0.5 * area;

  // Every inclusion cell has its centroid at distance >= l0 from the
  // boundary, so extremes over that interior set bound the extremes on D.
  const auto grads = gradient_field(u0);
  double sup = 0.0;
  double inf = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.distance_to_boundary(mesh.cell_centroid(c)) < k.ell0) continue;
    const double g2 = grads[c].squaredNorm();
    sup = std::max(sup, g2);
    inf = std::min(inf, g2);
  }
  if (power.re_w0 > 0.0 && power.c2 > 0.0 && sup > 0.0) s.analytic_k1 = power.re_w0 / (power.c2 * sup);
  if (power.re_w0 > 0.0 && power.c1 > 0.0 && std::isfinite(inf) && inf > 0.0) {
    s.analytic_k2 = power.re_w0 / (power.c1 * inf);
  }
  return s;
}

bool Range::covers(double v) const {
  const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  return v >= lo - tol && v <= hi + tol;
}

bool CalibrationDescriptor::covers(const CalibrationSample& s) const {
  return alpha0.covers(s.alpha0) && alpha1.covers(s.alpha1) && beta.covers(s.beta) && ell0.covers(s.ell0) &&
         ell1.covers(s.ell1) && h_ratio.covers(s.h_ratio) && s.mesh_n >= mesh_n_min && s.mesh_n <= mesh_n_max &&
         std::find(boundary_kinds.begin(), boundary_kinds.end(), s.boundary_kind) != boundary_kinds.end();
}

Calibration calibrate(std::span<const CalibrationSample> samples) {
  Calibration cal;
  bool first = true;
  for (const CalibrationSample& s : samples) {
    if (!(s.re_gap > 0.0) || !(s.re_w0 > 0.0)) {
      cal.excluded.push_back(s.id);
      continue;
    }
    const double k = s.k_value();
    if (first) {
      cal.k1 = cal.k2 = k;
    } else {
      cal.k1 = std::min(cal.k1, k);
      cal.k2 = std::max(cal.k2, k);
    }
    CalibrationDescriptor& d = cal.descriptor;
    widen(d.alpha0, s.alpha0, first);
    widen(d.alpha1, s.alpha1, first);
    widen(d.beta, s.beta, first);
    widen(d.ell0, s.ell0, first);
    widen(d.ell1, s.ell1, first);
    widen(d.h_ratio, s.h_ratio, first);
    d.mesh_n_min = first ? s.mesh_n : std::min(d.mesh_n_min, s.mesh_n);
    d.mesh_n_max = first ? s.mesh_n : std::max(d.mesh_n_max, s.mesh_n);
    if (std::find(d.boundary_kinds.begin(), d.boundary_kinds.end(), s.boundary_kind) == d.boundary_kinds.end()) {
      d.boundary_kinds.push_back(s.boundary_kind);
    }
    if (s.analytic_k1) cal.analytic_k1 = cal.analytic_k1 ? std::min(*cal.analytic_k1, *s.analytic_k1) : *s.analytic_k1;
    if (s.analytic_k2) cal.analytic_k2 = cal.analytic_k2 ? std::max(*cal.analytic_k2, *s.analytic_k2) : *s.analytic_k2;
    cal.ids.push_back(s.id);
    cal.hashes.push_back(s.hash);
    ++cal.sample_count;
    first = false;
  }
  if (cal.sample_count == 0) throw Error(ErrorCode::Calibration, "no sample with positive power gap");
  std::sort(cal.descriptor.boundary_kinds.begin(), cal.descriptor.boundary_kinds.end());
  return cal;
}

SizeEstimate estimate_size(const CalibrationSample& measurement, const Calibration& calibration,
                           ConstantSource source) {
  double k1 = calibration.k1;
  double k2 = calibration.k2;
  if (source == ConstantSource::Analytic) {
    if (!calibration.analytic_k1 || !calibration.analytic_k2) {
      throw Error(ErrorCode::Calibration, "calibration carries no analytic constants");
    }
    k1 = *calibration.analytic_k1;
    k2 = *calibration.analytic_k2;
  }
  SizeEstimate e = estimate_size(measurement.re_gap, measurement.re_w0, k1, k2, source);
  e.upper_supported = measurement.erosion_condition;
  e.extrapolated = !calibration.descriptor.covers(measurement);
  return e;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "need two equal samples of size >= 2");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = 0.5 * (n + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateData, "constant sample has no ranking");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace cclab
