#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "attacks/attack_spec.hpp"
#include "json.hpp"
#include "protocol/config.hpp"

namespace qka::harness {

// One batch request: protocol parameters, optional adversary, trial count,
// seed, and an optional report destination.
struct ScenarioConfig {
  proto::ProtocolConfig protocol;
  std::optional<attack::AttackSpec> attack;
  long trials = 1;
  uint64_t seed = 1;
  std::string output_path;

  void validate() const;  // throws std::invalid_argument naming the field

  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace qka::harness
