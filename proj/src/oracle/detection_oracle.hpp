#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attacks/attack_spec.hpp"
#include "json.hpp"
#include "oracle/branch_tree.hpp"
#include "protocol/config.hpp"
#include "sim/state_vector.hpp"

namespace qka::oracle {

// One classical branch of the joint state an attack leaves at a checked
// position: the state, which of its qubits each participant announces an
// outcome for, and whether the branch belongs to the conditioning event
// the mixture declares (e.g. a wrong basis guess).  Qubits not listed in
// measured_qubits stay in adversary hands and are marginalized.
struct PositionBranch {
  double probability = 1.0;
  std::string record;
  StateVector state;
  std::vector<int> measured_qubits;
  bool conditioned = false;
};

struct ParticleMixture {
  std::vector<PositionBranch> branches;
  std::string condition;  // empty when the mixture has no conditioning event
  double condition_probability = 0.0;
};

// Exact mixture of post-correction position states under `attack` (null
// for an honest run), constructed from the protocol algebra one step at a
// time and independent of the execution engine.
ParticleMixture particle_mixture(const attack::AttackSpec* attack,
                                 int parties);

// Detection statistics of one checked position: a uniformly chosen basis,
// all-equal expected in the computational basis, even parity expected in
// the X basis.
struct PerParticleDetection {
  double p_z = 0.0;
  double p_x = 0.0;
  double p_total = 0.0;  // (p_z + p_x) / 2, the basis coin folded in
  std::string condition;
  std::optional<double> conditional_p_z;
  std::optional<double> conditional_p_x;
  std::optional<double> conditional_p_total;
  double condition_probability = 0.0;
};

PerParticleDetection per_particle_detection(const attack::AttackSpec* attack,
                                            int parties);

// Full event tree for one checked position: mixture branch, basis coin,
// joint outcome, with detection verdicts on the leaves.
BranchTree build_detection_branch_tree(const attack::AttackSpec* attack,
                                       int parties);

// Per-decoy disturbance of measure-and-resend in a uniformly random basis,
// derived by enumerating preparations, bases, and outcomes (evaluates to
// 1/4, kept as a computation so tests can cross-check the closed form).
double intercept_resend_decoy_error();

// Whole-run abort decomposition at the configuration's error threshold.
struct RunDetection {
  double p_first_abort = 0.0;
  double p_second_abort_given_first_pass = 0.0;
  double p_abort = 0.0;
};

// A channel aborts when its decoy error fraction exceeds the threshold; a
// detection round aborts when its error fraction over delta positions
// does.  Channels and rounds are independent and positions err
// independently at the per-particle rate, so at threshold zero this
// reduces to one minus the no-error powers.
RunDetection run_detection(const attack::AttackSpec* attack,
                           const proto::ProtocolConfig& config);

// Closed-form whole-run detection rates quoted in the protocol's published
// security analysis, where one exists, for side-by-side report columns.
std::optional<double> published_claim_detection(
    const attack::AttackSpec* attack, const proto::ProtocolConfig& config);

nlohmann::json to_json(const PerParticleDetection& per);
nlohmann::json to_json(const RunDetection& run);

}  // namespace qka::oracle
