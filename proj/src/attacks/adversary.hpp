#pragma once

#include <vector>

#include "attacks/attack_spec.hpp"
#include "protocol/run.hpp"

namespace qka::attack {

// Measures one in-flight qubit in a uniformly chosen basis (Z or X) and
// forwards the collapsed eigenstate.
void intercept_resend(StateVector& qubit, RandomStream& rng);

// Eavesdropper on one participant's quantum channel who measures each decoy
// independently with some probability and resends what she saw.  Signal
// qubits pass through untouched.
class InterceptResendAdversary final : public proto::Adversary {
 public:
  InterceptResendAdversary(int target, double per_decoy_probability)
      : target_(target), probability_(per_decoy_probability) {}

  void on_decoy(int party, StateVector& qubit, RandomStream& rng) override;
  void finalize(const proto::RunContext& ctx,
                proto::RunReport& report) override;

 private:
  int target_ = 1;
  double probability_ = 1.0;
  int intercepted_ = 0;
  int decoys_seen_ = 0;
};

// Eavesdropper probing whether the target's per-position basis bits can be
// recovered from public announcements alone.  Decoys on the target channel
// get intercept-resend treatment; every signal qubit is stored and replaced
// by a counterfeit |0>.  After the run she measures each stored qubit in
// the basis conjugate to the disclosed check basis and picks the tag-bit
// hypothesis with the higher likelihood of the full public record.
class HashLeakAdversary final : public proto::Adversary {
 public:
  HashLeakAdversary(int target, bool suppress_first_detection)
      : target_(target), suppress_(suppress_first_detection) {}

  void on_transmit(int party, int l, proto::PositionState& pos,
                   RandomStream& rng) override;
  void on_decoy(int party, StateVector& qubit, RandomStream& rng) override;
  bool skip_first_detection() const override { return suppress_; }
  void finalize(const proto::RunContext& ctx,
                proto::RunReport& report) override;

 private:
  int infer_tag_bit(const proto::RunContext& ctx, int l);

  int target_ = 1;
  bool suppress_ = false;
};

// One or more insiders who measure their key qubits first and try to force
// a chosen bit at a chosen key position.  They follow the protocol
// otherwise; the interesting output is whether the head start helps.
class DishonestPartyAdversary final : public proto::Adversary {
 public:
  DishonestPartyAdversary(const char* label, std::vector<int> parties,
                          int target_bit, int target_position)
      : label_(label),
        parties_(std::move(parties)),
        target_bit_(target_bit),
        target_position_(target_position) {}

  std::vector<int> key_measurement_order(int parties) const override;
  void finalize(const proto::RunContext& ctx,
                proto::RunReport& report) override;

 private:
  const char* label_;
  std::vector<int> parties_;  // 1-based
  int target_bit_ = 0;
  int target_position_ = 0;
};

// Compromised TP that distributes the product state H^{t_1}|0> (x) ... (x)
// H^{t_m}|0> instead of entangled pairs and announces a fabricated swap
// label, hoping the agreed key becomes the all-zero string it can predict.
class ProductSourceAdversary final : public proto::Adversary {
 public:
  bool tp_prepare(int l, const proto::ProtocolConfig& cfg,
                  const std::vector<proto::BitString>& tags, RandomStream& rng,
                  proto::PositionState& out) override;
  void finalize(const proto::RunContext& ctx,
                proto::RunReport& report) override;
};

// Compromised TP that entangles ancilla states theta_0/theta_1 with the
// |0...0> / |1...1> branches of its source, keeps the ancillas, and after
// the run discriminates them to guess each agreed key bit.
class EntanglingSourceAdversary final : public proto::Adversary {
 public:
  explicit EntanglingSourceAdversary(AncillaPair ancilla)
      : ancilla_(std::move(ancilla)) {}

  bool tp_prepare(int l, const proto::ProtocolConfig& cfg,
                  const std::vector<proto::BitString>& tags, RandomStream& rng,
                  proto::PositionState& out) override;
  void finalize(const proto::RunContext& ctx,
                proto::RunReport& report) override;

 private:
  AncillaPair ancilla_;
};

// Outsider impersonating one participant without knowing its private key:
// she must guess the basis bit at every position and either applies the
// honest announced correction or a uniformly random one from {I, X}.
class ImpersonationAdversary final : public proto::Adversary {
 public:
  ImpersonationAdversary(int target, bool random_correction)
      : target_(target), random_correction_(random_correction) {}

  std::optional<int> party_encoding_bit(int party, int l,
                                        RandomStream& rng) override;
  std::optional<GateKind> party_correction(int party, int l,
                                           const GhzLabel& label,
                                           RandomStream& rng) override;
  void finalize(const proto::RunContext& ctx,
                proto::RunReport& report) override;

 private:
  int target_ = 1;
  bool random_correction_ = false;
  std::vector<int> guesses_;  // -1 where no guess was made
};

// (|0...0>|theta0> + |1...1>|theta1>) / sqrt(2) with the participant qubits
// in front, the state a corrupted source holds per position before any
// encoding.
StateVector canonical_entangled_source(const AncillaPair& ancilla,
                                       int parties);

// Optimal two-hypothesis discrimination: measures `state` with the Helstrom
// observable for the equal-prior pair (theta0, theta1) and returns the
// index of the guessed preparation.
int helstrom_guess(const StateVector& state, const StateVector& theta0,
                   const StateVector& theta1, RandomStream& rng);

}  // namespace qka::attack
