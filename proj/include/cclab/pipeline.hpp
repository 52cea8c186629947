#pragma once

#include "cclab/forward.hpp"
#include "cclab/power.hpp"
#include "cclab/scenario.hpp"
#include "cclab/size.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cclab {

/// Background and perturbed solutions of one scenario plus the power analysis.
struct ScenarioRun {
  std::uint64_t hash = 0;
  AdmissibilityReport admissibility;
  ComplexField u0;
  ComplexField u1;
  PowerReport power;
};

ScenarioRun run_scenario(const Scenario& scenario, const SolverOptions& options = {},
                         bool require_admissible = true);

/// Runs f(i) for i in [0, n) on up to `threads` workers. Results keep index
/// order; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

std::vector<ScenarioRun> run_ensemble(std::span<const Scenario> scenarios, int threads,
                                      const SolverOptions& options = {});

std::vector<CalibrationSample> calibration_samples(std::span<const Scenario> scenarios,
                                                   std::span<const ScenarioRun> runs);

}  // namespace cclab
