#pragma once

#include "cclab/scenario.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace cclab {

/// Nodal piecewise-linear complex potential on a mesh.
struct ComplexField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<complex> values;

  static ComplexField interpolate(std::shared_ptr<const Mesh> mesh, const std::function<complex(const Vec2&)>& f);

  /// Mass-weighted mean over the domain.
  complex mean() const;
  complex at_centroid(Index cell) const;
};

/// Real block Galerkin system with two bordering rows that pin the means of
/// the real and imaginary parts. Unknown layout:
///   [Re u (nv) | Im u (nv) | multiplier Re | multiplier Im].
struct BlockSystem {
  std::shared_ptr<const Mesh> mesh;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<complex> boundary_data;
  bool symmetric = false;
};

enum class Problem { Background, Perturbed };

BlockSystem assemble(std::shared_ptr<const Mesh> mesh, std::span<const Material> materials,
                     std::span<const complex> boundary_data);

/// Background uses (sigma0, eps0, zeta = 0) everywhere. Inadmissible
/// scenarios are refused unless `require_admissible` is false.
BlockSystem assemble(const Scenario& scenario, Problem which, bool require_admissible = true);

struct SolverOptions {
  enum class Kind { Direct, Krylov };
  Kind kind = Kind::Direct;
  double tolerance = 1e-12;  // Krylov relative residual
  int max_iterations = 20000;
  double acceptance = 1e-10;  // required relative residual of the returned solution
};

ComplexField solve_neumann(const BlockSystem& system, const SolverOptions& options = {});

/// Relative algebraic residual of a candidate solution, multipliers included.
double relative_residual(const BlockSystem& system, const Eigen::VectorXd& x);

/// Exact per-cell gradient of the piecewise-linear field.
std::vector<CVec2> gradient_field(const ComplexField& u);

/// L2 distance to an analytic function, degree-5 triangle quadrature.
double l2_distance(const ComplexField& u, const std::function<complex(const Vec2&)>& exact);

void write_solution_csv(const ComplexField& u, std::ostream& out);
void write_gradient_csv(const ComplexField& u, std::ostream& out);

}  // namespace cclab
