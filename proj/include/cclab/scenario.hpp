#pragma once

#include "cclab/inclusion.hpp"
#include "cclab/material.hpp"
#include "cclab/mesh.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cclab {

struct MeshSpec {
  int nx = 32;
  int ny = 32;
  double width = 1.0;
  double height = 1.0;
  Vec2 origin{0.0, 0.0};
};

/// Background admittivity sigma0 + i eps0. Per-cell tables, when non-empty,
/// replace the constant tensors.
struct BackgroundSpec {
  SymTensor sigma = SymTensor::isotropic(1.0);
  SymTensor eps;
  std::vector<SymTensor> sigma_cells;
  std::vector<SymTensor> eps_cells;
};

struct InclusionSpec {
  Shape shape;
  Material material;
};

/// Neumann data, edge-wise constant and evaluated at edge midpoints.
struct BoundarySpec {
  enum class Kind {
    NormalDot,    // amplitude * (direction . nu)
    Saddle,       // amplitude * grad(x^2 - y^2) . nu
    Alternating,  // amplitude * (-1)^edge
    Edges,        // explicit table
  };
  Kind kind = Kind::NormalDot;
  Vec2 direction{1.0, 0.0};
  complex amplitude{1.0, 0.0};
  std::vector<complex> values;
};

/// Admissibility constants alpha0, alpha1, beta, delta, Lipschitz bound L,
/// boundary clearance l0 and erosion depth l1.
struct Constants {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  double beta = 0.0;
  std::optional<double> delta;
  double lipschitz = 0.0;
  double ell0 = 0.0;
  double ell1 = 0.0;
};

struct ScenarioSpec {
  std::string id = "scenario";
  MeshSpec mesh;
  BackgroundSpec background;
  std::optional<InclusionSpec> inclusion;
  BoundarySpec boundary;
  Constants constants;
};

/// A built problem instance: mesh, per-cell background and perturbed
/// materials, inclusion indicator and boundary data. The perturbed material
/// differs from the background only on cells whose centroid lies in D, and
/// zeta vanishes off D.
class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.id; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  std::span<const Material> background() const { return background_; }
  std::span<const Material> perturbed() const { return perturbed_; }
  bool in_inclusion(Index c) const { return in_inclusion_[c] != 0; }
  std::span<const Index> inclusion_cells() const { return inclusion_cells_; }
  const std::optional<Inclusion>& inclusion() const { return inclusion_; }
  std::span<const complex> boundary_data() const { return h_; }
  const Constants& constants() const { return spec_.constants; }

 private:
  ScenarioSpec spec_;
  std::shared_ptr<const Mesh> mesh_;
  std::vector<Material> background_;
  std::vector<Material> perturbed_;
  std::vector<std::uint8_t> in_inclusion_;
  std::vector<Index> inclusion_cells_;
  std::optional<Inclusion> inclusion_;
  std::vector<complex> h_;
};

/// Evaluate boundary data on the edges of a mesh.
std::vector<complex> boundary_values(const Mesh& mesh, const BoundarySpec& spec);

// ---------------------------------------------------------------------------
// Admissibility

struct ConditionResult {
  bool applicable = true;
  bool pass = true;
  double margin = 0.0;  // pass <=> margin >= 0
  std::optional<Index> worst_cell;
};

struct AdmissibilityReport {
  ConditionResult background_bounds;    // alpha0^-1 <= sigma0 <= alpha0, |eps0| <= alpha0
  ConditionResult perturbed_bounds;     // (sigma1+zeta1)^-1, sigma1-zeta1, |eps1| <= alpha1
  ConditionResult jump;                 // M >= beta, N >= beta on D
  ConditionResult eps_jump;             // |eps1 - eps0| <= delta on D
  ConditionResult lipschitz;            // discrete Lipschitz quotient of gamma0 <= L
  ConditionResult jump_positivity;      // lambda_min(B1 - B0) >= 0 on D
  ConditionResult clearance;            // dist(D, boundary) >= l0, boundary cells untouched
  double lipschitz_estimate = 0.0;
  double max_eps_jump = 0.0;
  std::optional<double> min_jump_eigenvalue;  // lambda_min(B1 - B0) over D
  bool erosion_condition = true;               // |D_l1| >= |D| / 2 by cell counting

  bool jump_admissible() const { return jump.pass && jump_positivity.pass; }
  bool admissible() const {
    return background_bounds.pass && perturbed_bounds.pass && jump.pass && eps_jump.pass && lipschitz.pass &&
           jump_positivity.pass && clearance.pass;
  }
};

AdmissibilityReport check_admissibility(const Scenario& scenario);

/// Throws Error(Inadmissible / InadmissibleJump) describing the first failed
/// condition.
void require_admissible(const AdmissibilityReport& report);

// ---------------------------------------------------------------------------
// Chiral media

struct ChiralMedium {
  double rho = 1.0;        // |permittivity|
  double rho_tilde = 0.01; // |permeability|
  double theta = 0.0;      // phase: eps = rho e^{-i theta}, mu = rho_tilde e^{i theta}
  double chirality = 0.0;
  double omega = 1.0;
};

struct ChiralCoefficients {
  double sigma;
  double eps;
  double zeta;
  double k2;
};

/// Isotropic coefficients of the conjugate-coupled law obtained from the
/// Drude-Born-Fedorov relations with the imaginary part of the intrinsic
/// impedance dropped.
ChiralCoefficients chiral_to_admittivity(const ChiralMedium& medium);

// ---------------------------------------------------------------------------
// Ensembles

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct EnsembleRanges {
  int mesh_n = 32;
  Interval area_fraction{0.01, 0.1};
  Interval beta{0.2, 0.5};
  Interval sigma0_eigenvalues{0.8, 1.5};
  double eps0_max = 0.3;
  double jump_extra = 1.0;     // extra spread of M and N eigenvalues above beta
  double eps_jump_max = 0.05;  // |eps1 - eps0| bound, also declared as delta
  double ell0 = 0.1;
  double ell1_factor = 0.25;   // l1 = factor * smallest semi-axis
  Interval aspect{0.6, 1.0};   // ellipse minor/major
  std::vector<std::string> shapes{"disk", "ellipse"};
  bool fixed_material = false; // one material draw shared by the whole ensemble
  bool vary_size_only = false; // shared material, shape, placement and data; only the area varies
  bool complex_boundary = false;
  double min_jump_eigenvalue = 1e-3;
  int max_attempts = 200;
};

/// Deterministic admissible scenarios. Scenario k draws from its own stream
/// derived from (seed, k), so results do not depend on evaluation order.
std::vector<Scenario> generate_ensemble(std::uint64_t seed, int count, const EnsembleRanges& ranges);
ScenarioSpec generate_scenario_spec(std::uint64_t seed, int index, const EnsembleRanges& ranges);

// ---------------------------------------------------------------------------
// Inclusion measure

struct InclusionMeasure {
  double exact_area = 0.0;
  double cell_area = 0.0;
  double eroded_exact = 0.0;
  double eroded_cells = 0.0;
  bool erosion_condition = true;  // by cell counting
};

InclusionMeasure inclusion_measure(const Scenario& scenario);

}  // namespace cclab
