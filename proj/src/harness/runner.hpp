#pragma once

#include "harness/scenario.hpp"
#include "json.hpp"

namespace qka::harness {

// Runs the scenario's trials on independent substreams of the seed and
// returns the full report document: scenario echo, abort statistics against
// the exact oracle, detection breakdown, key statistics, attack-specific
// aggregates, and the first trial's transcript.  Purely computational; any
// file writing is the caller's job.
nlohmann::json run_batch(const ScenarioConfig& scenario);

}  // namespace qka::harness
