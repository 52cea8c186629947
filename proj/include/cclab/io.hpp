#pragma once

#include "cclab/continuation.hpp"
#include "cclab/power.hpp"
#include "cclab/scenario.hpp"
#include "cclab/size.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace cclab {

using Json = nlohmann::ordered_json;

ScenarioSpec scenario_from_json(const Json& j);
Json to_json(const ScenarioSpec& spec);

EnsembleRanges ranges_from_json(const Json& j);
Json to_json(const EnsembleRanges& ranges);

Json to_json(const AdmissibilityReport& report);
Json to_json(const PowerReport& report);
Json to_json(const SizeEstimate& estimate);
Json to_json(const Calibration& calibration);
Calibration calibration_from_json(const Json& j);
Json to_json(const ThreeBallReport& report);
Json to_json(const InclusionMeasure& measure);

/// FNV-1a over the compact dump of the scenario JSON.
std::uint64_t scenario_hash(const ScenarioSpec& spec);
std::string hex(std::uint64_t value);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace cclab
