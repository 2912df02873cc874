#include "harness/scenario.hpp"

#include <stdexcept>

namespace qka::harness {

using nlohmann::json;

void ScenarioConfig::validate() const {
  protocol.validate();
  if (attack) attack->validate(protocol);
  if (trials < 1) {
    throw std::invalid_argument("trials: must be at least 1");
  }
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("scenario: expected an object");
  }
  ScenarioConfig sc;
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    if (!p.is_object()) {
      throw std::invalid_argument("protocol: expected an object");
    }
    sc.protocol.parties = p.value("parties", sc.protocol.parties);
    sc.protocol.key_len = p.value("key_len", sc.protocol.key_len);
    sc.protocol.delta = p.value("delta", sc.protocol.delta);
    sc.protocol.zeta = p.value("zeta", sc.protocol.zeta);
    sc.protocol.error_threshold =
        p.value("error_threshold", sc.protocol.error_threshold);
  }
  if (j.contains("attack") && !j.at("attack").is_null()) {
    sc.attack = attack::AttackSpec::from_json(j.at("attack"));
  }
  sc.trials = j.value("trials", sc.trials);
  sc.seed = j.value("seed", sc.seed);
  sc.output_path = j.value("output_path", sc.output_path);
  return sc;
}

json ScenarioConfig::to_json() const {
  json j;
  j["protocol"] = json{{"parties", protocol.parties},
                       {"key_len", protocol.key_len},
                       {"delta", protocol.delta},
                       {"zeta", protocol.zeta},
                       {"error_threshold", protocol.error_threshold}};
  j["attack"] = attack ? attack->to_json() : json();
  j["trials"] = trials;
  j["seed"] = seed;
  j["output_path"] = output_path;
  return j;
}

}  // namespace qka::harness
