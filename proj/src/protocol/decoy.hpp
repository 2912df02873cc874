#pragma once

#include <utility>
#include <vector>

#include "sim/measurement.hpp"
#include "sim/state_vector.hpp"

namespace qka::proto {

// The four single-qubit decoy preparations.  Zero/One verify in the
// computational basis, Plus/Minus in the X basis.
enum class DecoyState { Zero, One, Plus, Minus };

MeasurementBasis decoy_basis(DecoyState s);
// Expected outcome bit when measured in its own basis (One and Minus -> 1).
int decoy_value(DecoyState s);
StateVector decoy_qubit(DecoyState s);

// One channel's worth of decoys: the slot indices they occupy inside the
// interleaved transmission of `signal_count + zeta` qubits, the prepared
// states (TP-private), and the in-flight qubits an adversary may tamper
// with.  Filled in by check_decoys: the announced bases and the receiver's
// measured outcomes.
struct DecoyRecord {
  int channel = 0;  // 1-based participant index
  std::vector<int> slots;
  std::vector<DecoyState> prepared;
  std::vector<StateVector> qubits;
  std::vector<MeasurementBasis> bases;
  std::vector<int> outcomes;
};

// TP inserts `zeta` decoys at random distinct slots among the channel's
// transmission.  Requires zeta >= 1 (a channel with no decoys has no
// first-detection check and skips this operation entirely).
DecoyRecord transmit_with_decoys(int channel, int signal_count, int zeta,
                                 RandomStream& rng);

// TP announces positions and preparation bases; the receiver measures each
// decoy in the announced basis and announces outcomes; TP compares against
// the prepared values.  Returns (error_count, checked_count) and fills the
// record's bases/outcomes.
std::pair<int, int> check_decoys(DecoyRecord& record, RandomStream& rng);

}  // namespace qka::proto
