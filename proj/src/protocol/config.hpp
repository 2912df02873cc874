#pragma once

namespace qka::proto {

// Session parameters.  A run consumes total_positions() = key_len +
// parties * delta entangled positions: delta detection positions per
// participant plus the surviving key positions.  zeta decoy qubits guard
// each TP -> participant channel; zeta = 0 disables the channel check
// entirely (degenerate mode used by some adversary experiments).
struct ProtocolConfig {
  int parties = 3;
  int key_len = 64;
  int delta = 8;
  int zeta = 16;
  double error_threshold = 0.0;

  int total_positions() const { return key_len + parties * delta; }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace qka::proto
