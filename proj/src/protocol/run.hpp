#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "protocol/auth.hpp"
#include "protocol/config.hpp"
#include "protocol/decoy.hpp"
#include "protocol/transcript.hpp"
#include "sim/measurement.hpp"
#include "sim/random_stream.hpp"
#include "sim/state_vector.hpp"

namespace qka::proto {

// Quantum state of one protocol position.
//
// Before the swap, an honest position holds the m pairs in the layout
// (T_1, P_1, T_2, P_2, ...); afterwards only the participant qubits remain
// and slot i of `holder` names participant i+1's qubit inside psi.  A
// holder of -1 means that participant received a counterfeit qubit instead
// (tracked separately in `fakes`), while the genuine qubit stays in psi at
// `eve_qubit` under the eavesdropper's control.  `ancilla` lists qubits a
// compromised TP retained.
struct PositionState {
  StateVector psi;
  std::vector<int> tp_qubit;  // empty when TP announces without measuring
  std::vector<int> holder;
  std::vector<StateVector> fakes;
  int eve_qubit = -1;
  std::vector<int> ancilla;
  GhzLabel announced;
};

// Per-position record of what each role disclosed, available to adversary
// post-processing alongside the quantum state.
struct RunContext {
  const ProtocolConfig& config;
  const std::vector<PartyIdentity>& parties;
  const std::vector<BitString>& tags;  // ground truth for scoring only
  std::vector<PositionState>& positions;
  const Transcript& transcript;
  // round_of_position[l] = detection round index, or -1 for key positions.
  const std::vector<int>& round_of_position;
  const std::vector<MeasurementBasis>& basis_of_position;
  const std::vector<std::vector<int>>& outcomes_of_position;
  const std::vector<int>& key_positions;
  const std::vector<BitString>& keys;  // per party, per key position
  RandomStream& rng;
};

// Attack hook surface.  Hooks see in-flight qubits, public announcements,
// and (for TP-role attacks only) the tags TP legitimately derives; no hook
// implementation may touch other private state.  The default implementation
// of every hook is honest behavior.
class Adversary {
 public:
  virtual ~Adversary() = default;

  // Step 2: substitute TP's source for position l.  Return false to use
  // the honest PhiPlus pairs.
  virtual bool tp_prepare(int l, const ProtocolConfig& cfg,
                          const std::vector<BitString>& tags,
                          RandomStream& rng, PositionState& out) {
    (void)l, (void)cfg, (void)tags, (void)rng, (void)out;
    return false;
  }

  // Channel tampering while position l's participant qubit is in flight.
  virtual void on_transmit(int party, int l, PositionState& pos,
                           RandomStream& rng) {
    (void)party, (void)l, (void)pos, (void)rng;
  }

  // Channel tampering on one in-flight decoy.
  virtual void on_decoy(int party, StateVector& qubit, RandomStream& rng) {
    (void)party, (void)qubit, (void)rng;
  }

  // Disables decoy insertion and the channel check (analysis mode).
  virtual bool skip_first_detection() const { return false; }

  // Step 4: the encoding bit participant `party` applies at position l.
  virtual std::optional<int> party_encoding_bit(int party, int l,
                                                RandomStream& rng) {
    (void)party, (void)l, (void)rng;
    return std::nullopt;
  }

  // Step 6: the correction participant `party` applies, given the announced
  // label (honest: Z^{u1} for party 1, X^{u_i} otherwise).
  virtual std::optional<GateKind> party_correction(int party, int l,
                                                   const GhzLabel& label,
                                                   RandomStream& rng) {
    (void)party, (void)l, (void)label, (void)rng;
    return std::nullopt;
  }

  // Step 9: order (0-based party indices) in which parties measure.
  virtual std::vector<int> key_measurement_order(int parties) const {
    std::vector<int> order(parties);
    for (int i = 0; i < parties; ++i) order[i] = i;
    return order;
  }

  // After the run: fill report.attack_stats.
  virtual void finalize(const RunContext& ctx, RunReport& report) {
    (void)ctx, (void)report;
  }
};

// Honest source: |phi+>^{tensor m} in the (T_1, P_1, ..., T_m, P_m) layout.
StateVector tp_prepare_position(int parties);

// Step 4 on a pre-swap position state: TP applies H^{tp_bits[i]} to T_i and
// participant i applies H^{party_bits[i]} to P_i.
void apply_auth_encoding(StateVector& position, const std::vector<int>& tp_bits,
                         const std::vector<int>& party_bits);

// Step 5 + 6 on a pre-swap position state: measures the T qubits in the
// generalized Bell basis, announces the label, applies the corrections
// Z^{u1} on P_1 and X^{u_i} on P_i, and returns the label plus the
// participants' m-qubit post-correction state.
std::pair<GhzLabel, StateVector> swap_and_correct(const StateVector& position,
                                                  RandomStream& rng);

// Full protocol execution.  `adversary` may be null (honest run).
RunReport run_protocol(const ProtocolConfig& config, Adversary* adversary,
                       RandomStream& rng);

// Step engine behind run_protocol, stepwise-drivable for tests.
class ProtocolEngine {
 public:
  ProtocolEngine(const ProtocolConfig& config, Adversary* adversary,
                 RandomStream& rng);

  RunReport run();

  // Individual phases; each returns false when the protocol aborted.
  void setup_identities();
  void prepare_positions();
  bool first_detection();
  void encode();
  void swap_and_announce();
  void apply_corrections();
  bool second_detection();
  void extract_keys();
  RunReport finish();

  const std::vector<PartyIdentity>& parties() const { return parties_; }
  const std::vector<BitString>& tags() const { return tags_; }
  std::vector<PositionState>& positions() { return positions_; }
  const Transcript& transcript() const { return transcript_; }
  const std::vector<int>& key_positions() const { return key_positions_; }
  const std::vector<BitString>& keys() const { return keys_; }

 private:
  int measure_party(PositionState& pos, int party, MeasurementBasis basis);
  void apply_party_gate(PositionState& pos, int party, GateKind gate);
  void abort(std::string reason);

  const ProtocolConfig& config_;
  Adversary* adversary_;
  RandomStream& rng_;

  std::vector<PartyIdentity> parties_;
  std::vector<uint8_t> tp_nonce_;
  std::vector<BitString> tags_;
  std::vector<PositionState> positions_;
  Transcript transcript_;
  bool aborted_ = false;
  int first_detection_errors_ = 0;
  int second_detection_errors_ = 0;

  std::vector<int> round_of_position_;
  std::vector<MeasurementBasis> basis_of_position_;
  std::vector<std::vector<int>> outcomes_of_position_;
  std::vector<int> key_positions_;
  std::vector<BitString> keys_;
};

}  // namespace qka::proto
