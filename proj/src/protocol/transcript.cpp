#include "protocol/transcript.hpp"

namespace qka::proto {

using nlohmann::json;

json to_json(const Transcript& t) {
  json decoys = json::array();
  for (const auto& d : t.decoy_checks) {
    decoys.push_back({{"channel", d.channel},
                      {"slots", d.slots},
                      {"bases", d.bases},
                      {"outcomes", d.outcomes},
                      {"errors", d.errors}});
  }
  json rounds = json::array();
  for (const auto& r : t.detection_rounds) {
    rounds.push_back({{"initiator", r.initiator},
                      {"positions", r.positions},
                      {"bases", r.bases},
                      {"outcomes", r.outcomes},
                      {"errors", r.errors}});
  }
  return json{{"party_ids", t.party_ids},
              {"hash_function", t.hash_function},
              {"tp_nonce", t.tp_nonce},
              {"party_nonces", t.party_nonces},
              {"decoy_checks", decoys},
              {"announced_labels", t.announced_labels},
              {"detection_rounds", rounds},
              {"abort_reason", t.abort_reason}};
}

json to_json(const RunReport& r) {
  return json{{"passed", r.passed},
              {"keys", r.keys},
              {"first_detection_errors", r.first_detection_errors},
              {"second_detection_errors", r.second_detection_errors},
              {"transcript", to_json(r.transcript)},
              {"attack_stats", r.attack_stats}};
}

}  // namespace qka::proto
