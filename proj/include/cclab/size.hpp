#pragma once

#include "cclab/power.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cclab {

enum class ConstantSource { Calibrated, Analytic, User };

std::string to_string(ConstantSource source);

/// Bracket K1 r <= |D| <= K2 r with r = Re(dW) / Re(W0).
struct SizeEstimate {
  double ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  ConstantSource source = ConstantSource::User;
  bool negative_ratio = false;   // inadmissible scenario suspected
  bool upper_supported = true;   // erosion condition on D held
  bool extrapolated = false;     // scenario outside the calibrated class

  bool brackets(double area) const { return lower <= area && area <= upper; }
};

/// Throws Error(DegeneratePower) when re_w0 <= 0 and Error(InvalidArgument)
/// when k1 > k2 or either constant is negative.
SizeEstimate estimate_size(double re_gap, double re_w0, double k1, double k2,
                           ConstantSource source = ConstantSource::User);

/// ||h||_{L2} / ||h||_{H^-1/2}, the negative norm replaced by the single-layer
/// quadratic form with kernel -log|x - y| / (2 pi) and exact self-edge terms.
/// Throws Error(DegenerateData) for vanishing data.
double h_norm_ratio(std::span<const complex> h, const Mesh& mesh);

/// Per-scenario data feeding a calibration.
struct CalibrationSample {
  std::string id;
  std::uint64_t hash = 0;
  double area = 0.0;  // |D| by cell counting
  double re_gap = 0.0;
  double re_w0 = 0.0;
  double alpha0 = 0.0, alpha1 = 0.0, beta = 0.0, ell0 = 0.0, ell1 = 0.0;
  int mesh_n = 0;
  std::string boundary_kind;
  double h_ratio = 0.0;
  bool erosion_condition = true;
  /// Data-driven interior-estimate constants (absent if not computable).
  std::optional<double> analytic_k1;
  std::optional<double> analytic_k2;

  /// |D| Re(W0) / Re(dW), the value a perfect constant would take.
  double k_value() const { return area * re_w0 / re_gap; }
};

/// Interior gradient extremes over cells at distance >= l0 from the
/// boundary, combined with C1, C2 into K1 = Re W0 / (C2 sup|grad u0|^2) and
/// K2 = Re W0 / (C1 inf|grad u0|^2).
CalibrationSample make_sample(const Scenario& scenario, const ComplexField& u0, const PowerReport& power,
                              std::uint64_t hash);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool covers(double v) const;
};

struct CalibrationDescriptor {
  Range alpha0, alpha1, beta, ell0, ell1, h_ratio;
  int mesh_n_min = 0;
  int mesh_n_max = 0;
  std::vector<std::string> boundary_kinds;

  bool covers(const CalibrationSample& s) const;
};

struct Calibration {
  double k1 = 0.0;
  double k2 = 0.0;
  std::size_t sample_count = 0;
  std::vector<std::string> ids;
  std::vector<std::uint64_t> hashes;
  std::vector<std::string> excluded;  // Re(dW) <= 0
  CalibrationDescriptor descriptor;
  std::optional<double> analytic_k1;  // min over samples
  std::optional<double> analytic_k2;  // max over samples
};

/// K1, K2 = min, max of |D| Re(W0) / Re(dW) over samples with Re(dW) > 0.
/// Throws Error(Calibration) if no sample survives.
Calibration calibrate(std::span<const CalibrationSample> samples);

/// Apply a calibration to a measurement, flagging extrapolation.
SizeEstimate estimate_size(const CalibrationSample& measurement, const Calibration& calibration,
                           ConstantSource source = ConstantSource::Calibrated);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace cclab
