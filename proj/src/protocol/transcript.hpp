#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace qka::proto {

// Everything below is classical data the protocol discloses publicly.
// Private keys, auth tags, and agreed key bits must never appear here;
// a serialization test scans for them.

struct DecoyDisclosure {
  int channel = 0;
  std::vector<int> slots;
  std::string bases;  // one 'z'/'x' per decoy
  std::vector<int> outcomes;
  int errors = 0;
};

struct DetectionDisclosure {
  int initiator = 0;  // 1-based party whose round this is
  std::vector<int> positions;
  std::string bases;  // one 'z'/'x' per position
  std::vector<std::vector<int>> outcomes;  // per position, one bit per party
  int errors = 0;
};

struct Transcript {
  std::vector<std::string> party_ids;
  std::string hash_function;
  std::string tp_nonce;                  // hex
  std::vector<std::string> party_nonces;  // hex
  std::vector<DecoyDisclosure> decoy_checks;
  std::vector<std::string> announced_labels;  // one m-bit string per position
  std::vector<DetectionDisclosure> detection_rounds;
  std::string abort_reason;  // empty when the run completed
};

nlohmann::json to_json(const Transcript& t);

// Outcome of one protocol execution.  keys holds one bit string per party
// and stays empty when the run aborted.
struct RunReport {
  bool passed = false;
  std::vector<std::string> keys;
  int first_detection_errors = 0;
  int second_detection_errors = 0;
  Transcript transcript;
  nlohmann::json attack_stats;  // null unless an adversary was active
};

nlohmann::json to_json(const RunReport& r);

}  // namespace qka::proto
