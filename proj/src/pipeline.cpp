#include "cclab/pipeline.hpp"

#include "cclab/io.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace cclab {

ScenarioRun run_scenario(const Scenario& scenario, const SolverOptions& options, bool require_adm) {
  ScenarioRun run;
  run.hash = scenario_hash(scenario.spec());
  run.admissibility = check_admissibility(scenario);
  if (require_adm) require_admissible(run.admissibility);
  run.u0 = solve_neumann(assemble(scenario, Problem::Background, false), options);
  run.u1 = solve_neumann(assemble(scenario, Problem::Perturbed, false), options);
  run.power = analyze_power(scenario, run.u0, run.u1);
  return run;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<ScenarioRun> run_ensemble(std::span<const Scenario> scenarios, int threads,
                                      const SolverOptions& options) {
  std::vector<ScenarioRun> runs(scenarios.size());
  parallel_for(scenarios.size(), threads, [&](std::size_t i) { runs[i] = run_scenario(scenarios[i], options); });
  return runs;
}

std::vector<CalibrationSample> calibration_samples(std::span<const Scenario> scenarios,
                                                   std::span<const ScenarioRun> runs) {
  std::vector<CalibrationSample> samples;
  samples.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    samples.push_back(make_sample(scenarios[i], runs[i].u0, runs[i].power, runs[i].hash));
  }
  return samples;
}

}  // namespace cclab
