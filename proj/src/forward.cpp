#include "cclab/forward.hpp"

#include "cclab/csv.hpp"
#include "cclab/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

namespace cclab {

ComplexField ComplexField::interpolate(std::shared_ptr<const Mesh> mesh,
                                       const std::function<complex(const Vec2&)>& f) {
  ComplexField u{mesh, std::vector<complex>(mesh->num_vertices())};
  for (Index v = 0; v < mesh->num_vertices(); ++v) u.values[v] = f(mesh->vertices()[v]);
  return u;
}

complex ComplexField::mean() const {
  complex sum = 0.0;
  const auto mass = mesh->vertex_mass();
  for (std::size_t v = 0; v < values.size(); ++v) sum += mass[v] * values[v];
  return sum / mesh->area();
}

complex ComplexField::at_centroid(Index cell) const {
  const auto& c = mesh->cells()[cell];
  return (values[c[0]] + values[c[1]] + values[c[2]]) / 3.0;
}

BlockSystem assemble(std::shared_ptr<const Mesh> mesh, std::span<const Material> materials,
                     std::span<const complex> boundary_data) {
  const Mesh& m = *mesh;
  if (static_cast<Index>(materials.size()) != m.num_cells()) {
    throw Error(ErrorCode::InvalidArgument, "one material per cell expected");
  }
  if (boundary_data.size() != m.boundary_edges().size()) {
    throw Error(ErrorCode::InvalidArgument, "one boundary value per edge expected");
  }
  const Index nv = m.num_vertices();
  const Index n = 2 * nv + 2;

  BlockSystem sys;
  sys.mesh = mesh;
  sys.boundary_data.assign(boundary_data.begin(), boundary_data.end());
  sys.symmetric = true;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m.num_cells()) * 36 + 4 * nv);
  for (Index c = 0; c < m.num_cells(); ++c) {
    const Material& mat = materials[c];
    if (mat.eps != SymTensor{}) sys.symmetric = false;
    const Mat2 plus = mat.sigma.matrix() + mat.zeta.matrix();
    const Mat2 minus = mat.sigma.matrix() - mat.zeta.matrix();
    const Mat2 eps = mat.eps.matrix();
    const auto& g = m.shape_gradients(c);
    const double area = m.cell_area(c);
    const Eigen::Matrix3d k_plus = area * g * plus * g.transpose();
    const Eigen::Matrix3d k_minus = area * g * minus * g.transpose();
    const Eigen::Matrix3d k_eps = area * g * eps * g.transpose();
    const auto& cell = m.cells()[c];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const Index ra = cell[a];
        const Index cb = cell[b];
        triplets.emplace_back(ra, cb, k_plus(a, b));
        triplets.emplace_back(nv + ra, nv + cb, k_minus(a, b));
        if (k_eps(a, b) != 0.0) {
          triplets.emplace_back(ra, nv + cb, -k_eps(a, b));
          triplets.emplace_back(nv + ra, cb, k_eps(a, b));
        }
      }
    }
  }
  const auto mass = m.vertex_mass();
  for (Index v = 0; v < nv; ++v) {
    triplets.emplace_back(v, 2 * nv, mass[v]);
    triplets.emplace_back(2 * nv, v, mass[v]);
    triplets.emplace_back(nv + v, 2 * nv + 1, mass[v]);
    triplets.emplace_back(2 * nv + 1, nv + v, mass[v]);
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();

  sys.rhs = Eigen::VectorXd::Zero(n);
  const auto edges = m.boundary_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const complex load = 0.5 * edges[e].length * boundary_data[e];
    for (Index v : edges[e].vertices) {
      sys.rhs[v] += load.real();
      sys.rhs[nv + v] += load.imag();
    }
  }
  return sys;
}

BlockSystem assemble(const Scenario& scenario, Problem which, bool require_admissible) {
  if (require_admissible) cclab::require_admissible(check_admissibility(scenario));
  const auto materials = which == Problem::Background ? scenario.background() : scenario.perturbed();
  return assemble(scenario.mesh_ptr(), materials, scenario.boundary_data());
}

double relative_residual(const BlockSystem& system, const Eigen::VectorXd& x) {
  const double bnorm = system.rhs.norm();
  const double rnorm = (system.matrix * x - system.rhs).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

namespace {

// Exact solver for the bordered system [A C; C^T 0]. The left null space of
// A is spanned by the Re and Im constants, which fixes the multipliers; the
// remaining singular system is factored with one vertex pinned per block and
// the constants are restored from the border rows. The dense border never
// enters a factorization.
class BorderedSolver {
 public:
  BorderedSolver(const BlockSystem& system, const SolverOptions& options)
      : nv_(system.mesh->num_vertices()), mass_(system.mesh->vertex_mass()), area_(system.mesh->area()),
        kind_(options.kind) {
    a_ = system.matrix.topLeftCorner(2 * nv_, 2 * nv_);
    auto& a = a_;
    const Index pin_r = 0;
    const Index pin_i = nv_;
    a.prune([&](Index r, Index c, double) { return r != pin_r && r != pin_i && c != pin_r && c != pin_i; });
    a.coeffRef(pin_r, pin_r) = 1.0;
    a.coeffRef(pin_i, pin_i) = 1.0;
    a.makeCompressed();
    if (kind_ == SolverOptions::Kind::Direct) {
      lu_.analyzePattern(a);
      lu_.factorize(a);
      if (lu_.info() != Eigen::Success) {
        throw Error(ErrorCode::Solver, "sparse LU factorization failed: " + lu_.lastErrorMessage());
      }
    } else {
      krylov_.preconditioner().setDroptol(1e-6);
      krylov_.preconditioner().setFillfactor(20);
      krylov_.setTolerance(options.tolerance);
      krylov_.setMaxIterations(options.max_iterations);
      krylov_.compute(a);
      if (krylov_.info() != Eigen::Success) throw Error(ErrorCode::Solver, "ILUT preconditioner setup failed");
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) {
    const double lam_r = rhs.head(nv_).sum() / area_;
    const double lam_i = rhs.segment(nv_, nv_).sum() / area_;
    Eigen::VectorXd g = rhs.head(2 * nv_);
    for (Index v = 0; v < nv_; ++v) {
      g[v] -= lam_r * mass_[v];
      g[nv_ + v] -= lam_i * mass_[v];
    }
    g[0] = 0.0;
    g[nv_] = 0.0;
    Eigen::VectorXd w;
    if (kind_ == SolverOptions::Kind::Direct) {
      w = lu_.solve(g);
    } else {
      w = krylov_.solve(g);
      iterations_ += krylov_.iterations();
    }
    double mean_r = 0.0;
    double mean_i = 0.0;
    for (Index v = 0; v < nv_; ++v) {
      mean_r += mass_[v] * w[v];
      mean_i += mass_[v] * w[nv_ + v];
    }
    const double shift_r = (rhs[2 * nv_] - mean_r) / area_;
    const double shift_i = (rhs[2 * nv_ + 1] - mean_i) / area_;
    Eigen::VectorXd x(2 * nv_ + 2);
    for (Index v = 0; v < nv_; ++v) {
      x[v] = w[v] + shift_r;
      x[nv_ + v] = w[nv_ + v] + shift_i;
    }
    x[2 * nv_] = lam_r;
    x[2 * nv_ + 1] = lam_i;
    return x;
  }

  long iterations() const { return iterations_; }

 private:
  Index nv_;
  std::span<const double> mass_;
  double area_;
  SolverOptions::Kind kind_;
  Eigen::SparseMatrix<double> a_;  // the iterative solver keeps a reference
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov_;
  long iterations_ = 0;
};

}  // namespace

ComplexField solve_neumann(const BlockSystem& system, const SolverOptions& options) {
  const Mesh& m = *system.mesh;
  const complex total = boundary_integral(m, std::span<const complex>(system.boundary_data));
  double scale = 0.0;
  for (std::size_t e = 0; e < system.boundary_data.size(); ++e) {
    scale += std::abs(system.boundary_data[e]) * m.boundary_edges()[e].length;
  }
  if (std::abs(total) > 1e-10 * scale) {
    throw Error(ErrorCode::IncompatibleData, "Neumann data does not integrate to zero");
  }

  const Index nv = m.num_vertices();
  Eigen::VectorXd x;
  std::vector<double> history;
  if (system.rhs.norm() == 0.0) {
    x = Eigen::VectorXd::Zero(system.rhs.size());
  } else {
    BorderedSolver solver(system, options);
    x = solver.solve(system.rhs);
    history.push_back(relative_residual(system, x));
    // Refinement sweeps against the full bordered matrix.
    for (int sweep = 0; sweep < 2 && history.back() > 1e-14; ++sweep) {
      x += solver.solve(system.rhs - system.matrix * x);
      history.push_back(relative_residual(system, x));
    }
  }
  const bool converged = x.allFinite() && (history.empty() || history.back() <= options.acceptance);
  if (!converged) {
    std::ostringstream msg;
    msg << "relative residual history:";
    for (double r : history) msg << ' ' << r;
    throw Error(ErrorCode::Solver, msg.str());
  }

  ComplexField u{system.mesh, std::vector<complex>(nv)};
  for (Index v = 0; v < nv; ++v) u.values[v] = complex(x[v], x[nv + v]);
  return u;
}

std::vector<CVec2> gradient_field(const ComplexField& u) {
  const Mesh& m = *u.mesh;
  std::vector<CVec2> grads(m.num_cells());
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto& cell = m.cells()[c];
    const auto& g = m.shape_gradients(c);
    CVec2 grad = CVec2::Zero();
    for (int i = 0; i < 3; ++i) grad += u.values[cell[i]] * g.row(i).transpose().cast<complex>();
    grads[c] = grad;
  }
  return grads;
}

double l2_distance(const ComplexField& u, const std::function<complex(const Vec2&)>& exact) {
  // Dunavant degree-5, seven points (barycentric weights sum to one).
  static constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
  static constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
  static constexpr double points[7][4] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225}, {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
      {a2, b2, b2, w2},                         {b2, a2, b2, w2}, {b2, b2, a2, w2}};
  const Mesh& m = *u.mesh;
  double sum = 0.0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto& cell = m.cells()[c];
    for (const auto& q : points) {
      const Vec2 p = q[0] * m.vertices()[cell[0]] + q[1] * m.vertices()[cell[1]] + q[2] * m.vertices()[cell[2]];
      const complex uh = q[0] * u.values[cell[0]] + q[1] * u.values[cell[1]] + q[2] * u.values[cell[2]];
      sum += q[3] * m.cell_area(c) * std::norm(uh - exact(p));
    }
  }
  return std::sqrt(sum);
}

void write_solution_csv(const ComplexField& u, std::ostream& out) {
  out << "id,x,y,re_u,im_u\n";
  const auto verts = u.mesh->vertices();
  for (std::size_t v = 0; v < u.values.size(); ++v) {
    out << v << ',' << fmt17(verts[v].x()) << ',' << fmt17(verts[v].y()) << ',' << fmt17(u.values[v].real()) << ','
        << fmt17(u.values[v].imag()) << '\n';
  }
}

void write_gradient_csv(const ComplexField& u, std::ostream& out) {
  out << "cell,re_ux,im_ux,re_uy,im_uy\n";
  const auto grads = gradient_field(u);
  for (std::size_t c = 0; c < grads.size(); ++c) {
    out << c << ',' << fmt17(grads[c][0].real()) << ',' << fmt17(grads[c][0].imag()) << ','
        << fmt17(grads[c][1].real()) << ',' << fmt17(grads[c][1].imag()) << '\n';
  }
}

}  // namespace cclab
