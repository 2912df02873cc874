#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "protocol/config.hpp"
#include "protocol/run.hpp"
#include "sim/state_vector.hpp"

namespace qka::attack {

enum class AttackKind {
  ExternalInterceptResend,
  HashLeakInterceptResend,
  DishonestParticipant,
  CollusiveParticipants,
  TpProductState,
  TpEntangling,
  Impersonation,
};

const char* kind_name(AttackKind kind);
AttackKind kind_from_name(const std::string& name);

// The two ancilla states a compromised TP attaches to the |0...0> and
// |1...1> branches of its entangling source.
struct AncillaPair {
  StateVector theta0;
  StateVector theta1;

  amp_t overlap() const { return inner_product(theta0, theta1); }

  // Single-qubit pair theta0 = |0>, theta1 = ov|0> + sqrt(1-ov^2)|1> with
  // real overlap ov in [0, 1].
  static AncillaPair from_overlap(double ov);

  void validate() const;  // throws std::invalid_argument
};

// Declarative description of one adversary, constructible from the harness
// configuration.  Fields beyond `kind` apply only to the kinds named in
// their comments.
struct AttackSpec {
  AttackKind kind = AttackKind::ExternalInterceptResend;
  int target = 1;            // channel & impersonation kinds: 1-based party
  std::vector<int> colluders;  // CollusiveParticipants
  int target_bit = 0;          // Dishonest/Collusive: the bit value to force
  int target_position = 0;     // Dishonest/Collusive: 0-based key position
  double per_decoy_probability = 1.0;   // ExternalInterceptResend
  bool suppress_first_detection = false;  // HashLeakInterceptResend
  std::string correction = "honest";      // Impersonation: honest | random
  AncillaPair ancilla = AncillaPair::from_overlap(1.0);  // TpEntangling

  void validate(const proto::ProtocolConfig& config) const;

  static AttackSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Instantiates the adversary implementing `spec`.  Attack-local state lives
// in the returned object, so callers create a fresh instance per run.
std::unique_ptr<proto::Adversary> make_adversary(const AttackSpec& spec);

// Exact (non-sampled) figures for the entangling source: the X-basis
// detection-round error probability per checked position, and TP's key-bit
// guessing advantage over 1/2 given optimal discrimination of the two
// post-selected ancilla states.
struct EntanglingRates {
  double x_basis_error_rate = 0.0;
  double tp_guess_advantage = 0.0;
};

EntanglingRates tp_entangling_rates(const AncillaPair& ancilla, int parties);

}  // namespace qka::attack
