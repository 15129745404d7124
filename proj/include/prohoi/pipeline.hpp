#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "prohoi/config.hpp"
#include "prohoi/metrics.hpp"

namespace prohoi {

// End-to-end run over one scenario: prior retrieval, sequence build,
// interpolation, a kinematic follower with optional scripted disturbance,
// drop monitoring, digital-twin prediction, recovery replan, and metric
// evaluation. Deterministic given (scenario, config, seed); the follower is a
// reference tracker with bounded noise standing in for a policy.
nlohmann::json run_pipeline(const Scenario& scenario, const Config& config, std::uint64_t seed);

// Batch over a scenario list; aggregates task metrics into the report.
nlohmann::json run_pipeline_batch(const std::vector<Scenario>& scenarios, const Config& config,
                                  std::uint64_t seed);

}  // namespace prohoi
