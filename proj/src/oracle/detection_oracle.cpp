#include "oracle/detection_oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "attacks/adversary.hpp"
#include "protocol/decoy.hpp"
#include "protocol/run.hpp"
#include "sim/measurement.hpp"

namespace qka::oracle {

using attack::AttackKind;
using attack::AttackSpec;

namespace {

std::vector<int> identity_slots(int parties) {
  std::vector<int> qubits(parties);
  for (int i = 0; i < parties; ++i) qubits[i] = i;
  return qubits;
}

std::string bit_pattern(std::size_t value, int width) {
  std::string s(width, '0');
  for (int i = 0; i < width; ++i) {
    if ((value >> (width - 1 - i)) & 1u) s[i] = '1';
  }
  return s;
}

void push_branch(ParticleMixture& mix, double probability, std::string record,
                 StateVector state, std::vector<int> measured,
                 bool conditioned = false) {
  PositionBranch branch;
  branch.probability = probability;
  branch.record = std::move(record);
  branch.state = std::move(state);
  branch.measured_qubits = std::move(measured);
  branch.conditioned = conditioned;
  mix.branches.push_back(std::move(branch));
}

// Swap-projects the 2m-qubit pre-swap state onto the announced label and
// applies the honest corrections on every participant slot except `skip`
// (-1 to correct all of them).
StateVector project_and_correct(const StateVector& source,
                                const GhzLabel& label, int skip) {
  const int m = source.num_qubits() / 2;
  std::vector<int> tp_qubits(m);
  for (int i = 0; i < m; ++i) tp_qubits[i] = 2 * i;
  StateVector chi = ghz_project(source, tp_qubits, label).second;
  for (int i = 0; i < m; ++i) {
    if (i == skip || !label.bits[i]) continue;
    apply_gate(chi, i == 0 ? GateKind::PauliZ : GateKind::PauliX, i);
  }
  return chi;
}

void add_honest_branch(ParticleMixture& mix, int parties) {
  push_branch(mix, 1.0, "entangled source, honest parties",
              ghz_state(GhzLabel(std::vector<uint8_t>(parties, 0))),
              identity_slots(parties));
}

void add_product_source_branch(ParticleMixture& mix, int parties) {
  // The basis tags cancel between source and participants, the fabricated
  // label's phase bit dies on |0...0>, so exactly |0...0> survives.
  push_branch(mix, 1.0, "product source |0...0>",
              make_basis_state(parties, 0), identity_slots(parties));
}

void add_entangling_source_branch(ParticleMixture& mix,
                                  const AttackSpec& spec, int parties) {
  // Tag cancellation and the phase-bit correction leave the canonical
  // entangled source; the ancilla qubits stay with TP and are marginalized.
  push_branch(mix, 1.0, "entangling source with retained ancilla",
              attack::canonical_entangled_source(spec.ancilla, parties),
              identity_slots(parties));
}

void add_impersonation_branches(ParticleMixture& mix, const AttackSpec& spec,
                                int parties) {
  const bool random_correction = spec.correction == "random";
  const int target = spec.target - 1;
  std::vector<int> tp_qubits(parties);
  for (int i = 0; i < parties; ++i) tp_qubits[i] = 2 * i;

  for (int wrong = 0; wrong <= 1; ++wrong) {
    // Matched guesses cancel pairwise; a wrong guess leaves one net
    // Hadamard on the target pair (either side, by the one-sided identity).
    StateVector source = proto::tp_prepare_position(parties);
    if (wrong) apply_gate(source, GateKind::Hadamard, 2 * target);
    const std::vector<double> dist = ghz_distribution(source, tp_qubits);
    for (std::size_t w = 0; w < dist.size(); ++w) {
      if (dist[w] <= 0.0) continue;
      const GhzLabel label = GhzLabel::from_index(parties, w);
      const StateVector chi = project_and_correct(source, label, target);
      const GateKind honest = label.bits[target]
                                  ? (target == 0 ? GateKind::PauliZ
                                                 : GateKind::PauliX)
                                  : GateKind::Identity;
      const std::string stem = std::string(wrong ? "wrong" : "right") +
                               " guess, label " + label.to_string();
      if (!random_correction) {
        StateVector corrected = chi;
        if (honest != GateKind::Identity) {
          apply_gate(corrected, honest, target);
        }
        push_branch(mix, 0.5 * dist[w], stem + ", honest correction",
                    std::move(corrected), identity_slots(parties),
                    wrong == 1);
      } else {
        for (int rbit = 0; rbit <= 1; ++rbit) {
          StateVector corrected = chi;
          if (rbit) apply_gate(corrected, GateKind::PauliX, target);
          push_branch(mix, 0.25 * dist[w],
                      stem + (rbit ? ", correction X" : ", correction I"),
                      std::move(corrected), identity_slots(parties),
                      wrong == 1);
        }
      }
    }
  }
  mix.condition = "wrong basis guess";
  mix.condition_probability = 0.5;
}

void add_hash_leak_branches(ParticleMixture& mix, const AttackSpec& spec,
                            int parties) {
  const int target = spec.target - 1;
  std::vector<int> tp_qubits(parties);
  for (int i = 0; i < parties; ++i) tp_qubits[i] = 2 * i;

  for (int b = 0; b <= 1; ++b) {
    // The stolen qubit never receives its Hadamard, so only the source-side
    // H^b survives on the target pair; honest pairs are H (x) H invariant.
    StateVector source = proto::tp_prepare_position(parties);
    if (b) apply_gate(source, GateKind::Hadamard, 2 * target);
    const std::vector<double> dist = ghz_distribution(source, tp_qubits);
    for (std::size_t u = 0; u < dist.size(); ++u) {
      if (dist[u] <= 0.0) continue;
      const GhzLabel label = GhzLabel::from_index(parties, u);
      StateVector chi = project_and_correct(source, label, target);

      // The counterfeit the target measures: |0> through the target's
      // encoding and announced correction.
      StateVector fake = make_basis_state(1, 0);
      if (b) apply_gate(fake, GateKind::Hadamard, 0);
      if (label.bits[target]) {
        apply_gate(fake, target == 0 ? GateKind::PauliZ : GateKind::PauliX,
                   0);
      }

      std::vector<int> measured = identity_slots(parties);
      measured[target] = parties;  // the fake rides behind the real qubits
      push_branch(mix, 0.5 * dist[u],
                  "tag bit " + std::to_string(b) + ", label " +
                      label.to_string(),
                  tensor(chi, fake), std::move(measured));
    }
  }
}

struct BasisDetection {
  double p_z = 0.0;
  double p_x = 0.0;
};

bool z_pattern_error(std::size_t outcome, int parties) {
  const std::size_t all_ones = (std::size_t{1} << parties) - 1;
  return outcome != 0 && outcome != all_ones;
}

bool x_pattern_error(std::size_t outcome) {
  return std::popcount(outcome) % 2 == 1;
}

BasisDetection branch_detection(const PositionBranch& branch) {
  const int parties = static_cast<int>(branch.measured_qubits.size());
  const std::vector<double> z_dist = outcome_distribution(
      branch.state, branch.measured_qubits, MeasurementBasis::Computational);
  const std::vector<double> x_dist = outcome_distribution(
      branch.state, branch.measured_qubits, MeasurementBasis::XBasis);
  BasisDetection det;
  for (std::size_t o = 0; o < z_dist.size(); ++o) {
    if (z_pattern_error(o, parties)) det.p_z += z_dist[o];
    if (x_pattern_error(o)) det.p_x += x_dist[o];
  }
  return det;
}

}  // namespace

ParticleMixture particle_mixture(const AttackSpec* attack, int parties) {
  if (parties < 2) {
    throw std::invalid_argument("parties: mixture needs at least 2");
  }
  ParticleMixture mix;
  if (attack == nullptr) {
    add_honest_branch(mix, parties);
    return mix;
  }
  switch (attack->kind) {
    case AttackKind::ExternalInterceptResend:
    case AttackKind::DishonestParticipant:
    case AttackKind::CollusiveParticipants:
      // These leave signal positions untouched.
      add_honest_branch(mix, parties);
      break;
    case AttackKind::TpProductState:
      add_product_source_branch(mix, parties);
      break;
    case AttackKind::TpEntangling:
      add_entangling_source_branch(mix, *attack, parties);
      break;
    case AttackKind::Impersonation:
      add_impersonation_branches(mix, *attack, parties);
      break;
    case AttackKind::HashLeakInterceptResend:
      add_hash_leak_branches(mix, *attack, parties);
      break;
  }
  return mix;
}

PerParticleDetection per_particle_detection(const AttackSpec* attack,
                                            int parties) {
  const ParticleMixture mix = particle_mixture(attack, parties);
  PerParticleDetection out;
  double cond_z = 0.0, cond_x = 0.0;
  for (const PositionBranch& branch : mix.branches) {
    const BasisDetection det = branch_detection(branch);
    out.p_z += branch.probability * det.p_z;
    out.p_x += branch.probability * det.p_x;
    if (branch.conditioned) {
      cond_z += branch.probability * det.p_z;
      cond_x += branch.probability * det.p_x;
    }
  }
  out.p_total = 0.5 * (out.p_z + out.p_x);
  if (!mix.condition.empty() && mix.condition_probability > 0.0) {
    out.condition = mix.condition;
    out.condition_probability = mix.condition_probability;
    out.conditional_p_z = cond_z / mix.condition_probability;
    out.conditional_p_x = cond_x / mix.condition_probability;
    out.conditional_p_total =
        0.5 * (*out.conditional_p_z + *out.conditional_p_x);
  }
  return out;
}

BranchTree build_detection_branch_tree(const AttackSpec* attack,
                                       int parties) {
  const ParticleMixture mix = particle_mixture(attack, parties);
  BranchNode root;
  root.record = "checked position";
  for (const PositionBranch& branch : mix.branches) {
    BranchNode branch_node;
    branch_node.record = branch.record;
    branch_node.probability = branch.probability;
    for (MeasurementBasis basis :
         {MeasurementBasis::Computational, MeasurementBasis::XBasis}) {
      const bool x_basis = basis == MeasurementBasis::XBasis;
      BranchNode basis_node;
      basis_node.record = x_basis ? "x basis" : "z basis";
      basis_node.probability = 0.5;
      const std::vector<double> dist =
          outcome_distribution(branch.state, branch.measured_qubits, basis);
      for (std::size_t o = 0; o < dist.size(); ++o) {
        BranchNode leaf;
        leaf.record = bit_pattern(o, parties);
        leaf.probability = dist[o];
        leaf.detected =
            x_basis ? x_pattern_error(o) : z_pattern_error(o, parties);
        basis_node.children.push_back(std::move(leaf));
      }
      branch_node.children.push_back(std::move(basis_node));
    }
    root.children.push_back(std::move(branch_node));
  }
  return BranchTree(std::move(root));
}

double intercept_resend_decoy_error() {
  double error = 0.0;
  for (proto::DecoyState d :
       {proto::DecoyState::Zero, proto::DecoyState::One,
        proto::DecoyState::Plus, proto::DecoyState::Minus}) {
    const StateVector prepared = proto::decoy_qubit(d);
    for (MeasurementBasis eavesdrop :
         {MeasurementBasis::Computational, MeasurementBasis::XBasis}) {
      for (int outcome = 0; outcome <= 1; ++outcome) {
        const auto [prob, resent] =
            project_outcome(prepared, {0}, eavesdrop, {outcome});
        if (prob <= 0.0) continue;
        const std::vector<double> check =
            outcome_distribution(resent, {0}, proto::decoy_basis(d));
        error += 0.25 * 0.5 * prob * check[1 - proto::decoy_value(d)];
      }
    }
  }
  return error;
}

namespace {

// Probability that one check of n independent positions erring at rate p
// each fails, i.e. that the error fraction exceeds the threshold under the
// same strict comparison the engine applies.
double check_failure_probability(int n, double p, double threshold) {
  if (n <= 0 || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0 > threshold ? 1.0 : 0.0;
  double pass = 0.0;
  double pmf = std::pow(1.0 - p, n);
  for (int k = 0; k <= n; ++k) {
    if (static_cast<double>(k) / n > threshold) break;
    pass += pmf;
    pmf *= (p / (1.0 - p)) * (n - k) / (k + 1);
  }
  return 1.0 - std::min(pass, 1.0);
}

}  // namespace

RunDetection run_detection(const AttackSpec* attack,
                           const proto::ProtocolConfig& config) {
  config.validate();
  const PerParticleDetection per =
      per_particle_detection(attack, config.parties);

  double per_decoy_error = 0.0;
  if (attack != nullptr && config.zeta > 0) {
    if (attack->kind == AttackKind::ExternalInterceptResend) {
      per_decoy_error =
          attack->per_decoy_probability * intercept_resend_decoy_error();
    } else if (attack->kind == AttackKind::HashLeakInterceptResend &&
               !attack->suppress_first_detection) {
      per_decoy_error = intercept_resend_decoy_error();
    }
  }

  RunDetection out;
  out.p_first_abort = check_failure_probability(config.zeta, per_decoy_error,
                                                config.error_threshold);
  const double round_abort = check_failure_probability(
      config.delta, per.p_total, config.error_threshold);
  out.p_second_abort_given_first_pass =
      1.0 - std::pow(1.0 - round_abort, config.parties);
  out.p_abort = out.p_first_abort +
                (1.0 - out.p_first_abort) * out.p_second_abort_given_first_pass;
  return out;
}

std::optional<double> published_claim_detection(
    const AttackSpec* attack, const proto::ProtocolConfig& config) {
  if (attack == nullptr) return std::nullopt;
  switch (attack->kind) {
    case AttackKind::TpProductState:
      return 1.0 - std::pow(0.25, config.delta);
    case AttackKind::Impersonation:
      return 1.0 - std::pow(0.625, config.delta);
    default:
      return std::nullopt;
  }
}

nlohmann::json to_json(const PerParticleDetection& per) {
  nlohmann::json j{
      {"p_z", per.p_z}, {"p_x", per.p_x}, {"p_total", per.p_total}};
  if (per.conditional_p_total) {
    j["condition"] = per.condition;
    j["condition_probability"] = per.condition_probability;
    j["conditional_p_z"] = *per.conditional_p_z;
    j["conditional_p_x"] = *per.conditional_p_x;
    j["conditional_p_total"] = *per.conditional_p_total;
  }
  return j;
}

nlohmann::json to_json(const RunDetection& run) {
  return nlohmann::json{{"p_first_abort", run.p_first_abort},
                        {"p_second_abort_given_first_pass",
                         run.p_second_abort_given_first_pass},
                        {"p_abort", run.p_abort}};
}

}  // namespace qka::oracle
