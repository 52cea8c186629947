#pragma once

#include "cclab/forward.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace cclab {

/// Boundary power of a potential under Neumann data h.
struct BoundaryPower {
  double hermitian = 0.0;  // integral of Re u Re h + Im u Im h
  complex bilinear = 0.0;  // integral of u h
};

BoundaryPower boundary_power(const ComplexField& u, std::span<const complex> h);

/// Cherkaev-Gibiansky matrix of a material, mapping (Re flux, Im grad) to
/// (Re grad, Im flux):
///   [[S^-1, S^-1 eps], [eps S^-1, sigma - zeta + eps S^-1 eps]],  S = sigma + zeta.
Mat4 cg_block(const Material& m);

/// Per-cell (Re flux, Im grad u).
std::vector<Vec4> cg_field(const ComplexField& u, std::span<const Material> materials);

struct BasicIdentity {
  double volume = 0.0;    // integral of B_j v_j . v_k
  double boundary = 0.0;  // integral of Re u_j Re h + Im u_k Im h
  double residual = 0.0;
};

/// j, k in {0, 1} select background or perturbed material for u_j, u_k.
BasicIdentity verify_basic_identity(const Scenario& scenario, const ComplexField& uj, const ComplexField& uk, int j,
                                    int k);

struct GapIdentity {
  double re_gap = 0.0;  // Re(W - W0), W = integral of u h
  double line1 = 0.0;   // int B0 (v0-v1).(v0-v1) + int_D (B1-B0) v1.v1
  double line2 = 0.0;   // -int B1 (v0-v1).(v0-v1) + int_D (B1-B0) v0.v0
  double residual1 = 0.0;
  double residual2 = 0.0;
  double cross_residual = 0.0;  // int (B0+B1)(v0-v1)^2 = int_D (B1-B0)(v0.v0 - v1.v1)
};

GapIdentity verify_gap_identity(const Scenario& scenario, const ComplexField& u0, const ComplexField& u1);

/// Decomposition B1 - B0 = C + D on one inclusion cell.
struct JumpCell {
  Index cell = 0;
  Mat2 m;  // (sigma1 + zeta1)^-1 - sigma0^-1
  Mat2 n;  // sigma1 - zeta1 - sigma0
  Mat4 c;
  Mat4 d;
  double lambda_min = 0.0;  // of B1 - B0
  double lambda_max = 0.0;
  double decomposition_residual = 0.0;  // |(B1 - B0) - (C + D)|, Frobenius
};

std::vector<JumpCell> jump_matrices(const Scenario& scenario);

struct PowerReport {
  complex w = 0.0;
  complex w0 = 0.0;
  complex gap = 0.0;  // W - W0
  double re_gap = 0.0;
  double re_w0 = 0.0;  // hermitian pairing of u0 with h
  double hermitian_w = 0.0;
  double hermitian_w0 = 0.0;
  double inclusion_energy = 0.0;  // int_D |grad u0|^2
  std::array<BasicIdentity, 4> basic;  // (0,0) (0,1) (1,0) (1,1)
  GapIdentity identity;
  double c1 = 0.0;
  double c2 = 0.0;
  double lower = 0.0;  // c1 * inclusion_energy
  double upper = 0.0;  // c2 * inclusion_energy
  bool lower_holds = true;
  bool upper_holds = true;
  bool guaranteed = true;  // lambda_min(B1 - B0) >= 0 on D
  std::optional<double> jump_lambda_min;
  std::optional<double> jump_lambda_max;

  double max_basic_residual() const;
  bool inequality_holds() const { return lower_holds && upper_holds; }
};

/// Full power analysis. Never throws on a negative jump; `guaranteed` and the
/// pass flags report it instead.
PowerReport analyze_power(const Scenario& scenario, const ComplexField& u0, const ComplexField& u1);

/// Two-sided energy bound with data-driven constants. Throws
/// Error(InadmissibleJump) when B1 - B0 has a negative eigenvalue on D.
PowerReport energy_bounds(const Scenario& scenario, const ComplexField& u0, const ComplexField& u1);

}  // namespace cclab
