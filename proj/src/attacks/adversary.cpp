#include "attacks/adversary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "sim/measurement.hpp"

namespace qka::attack {

using nlohmann::json;

void intercept_resend(StateVector& qubit, RandomStream& rng) {
  const MeasurementBasis basis =
      rng.bit() ? MeasurementBasis::XBasis : MeasurementBasis::Computational;
  MeasurementRecord rec = measure(qubit, {0}, basis, rng);
  qubit = std::move(rec.post_state);
}

void InterceptResendAdversary::on_decoy(int party, StateVector& qubit,
                                        RandomStream& rng) {
  if (party != target_) return;
  ++decoys_seen_;
  if (rng.u01() < probability_) {
    intercept_resend(qubit, rng);
    ++intercepted_;
  }
}

void InterceptResendAdversary::finalize(const proto::RunContext& ctx,
                                        proto::RunReport& report) {
  (void)ctx;
  report.attack_stats =
      json{{"kind", kind_name(AttackKind::ExternalInterceptResend)},
           {"target", target_},
           {"per_decoy_probability", probability_},
           {"decoys_seen", decoys_seen_},
           {"decoys_intercepted", intercepted_}};
}

void HashLeakAdversary::on_transmit(int party, int l,
                                    proto::PositionState& pos,
                                    RandomStream& rng) {
  (void)l, (void)rng;
  if (party != target_) return;
  const int slot = party - 1;
  if (pos.holder[slot] < 0) return;
  pos.eve_qubit = pos.holder[slot];
  pos.holder[slot] = -1;
  pos.fakes[slot] = make_basis_state(1, 0);
}

void HashLeakAdversary::on_decoy(int party, StateVector& qubit,
                                 RandomStream& rng) {
  if (party == target_) intercept_resend(qubit, rng);
}

namespace {

// Likelihood of the disclosed record at one check position under the
// hypothesis that the target's tag bit there equals b.
//
// Under hypothesis b the genuine qubits form H^b_{T_target} |phi+>^{(x)m}:
// honest pairs are H (x) H invariant so their tag bits drop out, while the
// stolen participant qubit never receives its Hadamard.  TP's swap then
// yields the announced label u, every party except the target applies its
// correction (the target corrects the counterfeit instead), the parties
// measure in the check basis and the eavesdropper measures her stored qubit
// in the conjugate basis.  The counterfeit is an independent |0> that went
// through H^b, the target's correction, and the check measurement.
double tag_hypothesis_likelihood(int b, int m, int target_slot,
                                 const GhzLabel& label,
                                 MeasurementBasis check_basis,
                                 const std::vector<int>& outcomes,
                                 int eve_outcome) {
  StateVector joint = proto::tp_prepare_position(m);
  if (b) apply_gate(joint, GateKind::Hadamard, 2 * target_slot);
  std::vector<int> tp_qubits(m);
  for (int i = 0; i < m; ++i) tp_qubits[i] = 2 * i;
  auto [label_prob, chi] = ghz_project(joint, tp_qubits, label);
  if (label_prob <= 0.0) return 0.0;

  for (int i = 0; i < m; ++i) {
    if (i == target_slot || !label.bits[i]) continue;
    apply_gate(chi, i == 0 ? GateKind::PauliZ : GateKind::PauliX, i);
  }

  // Fold each qubit's basis into Hadamards, then read one computational
  // amplitude: parties use the check basis, the eavesdropper its conjugate.
  for (int i = 0; i < m; ++i) {
    const bool x_basis = (i == target_slot)
                             ? check_basis == MeasurementBasis::Computational
                             : check_basis == MeasurementBasis::XBasis;
    if (x_basis) apply_gate(chi, GateKind::Hadamard, i);
  }
  std::size_t index = 0;
  for (int i = 0; i < m; ++i) {
    const int bit = (i == target_slot) ? eve_outcome : outcomes[i];
    index = (index << 1) | static_cast<unsigned>(bit);
  }
  const double joint_prob = std::norm(chi[index]);

  StateVector fake = make_basis_state(1, 0);
  if (b) apply_gate(fake, GateKind::Hadamard, 0);
  if (label.bits[target_slot]) {
    apply_gate(fake, target_slot == 0 ? GateKind::PauliZ : GateKind::PauliX,
               0);
  }
  if (check_basis == MeasurementBasis::XBasis) {
    apply_gate(fake, GateKind::Hadamard, 0);
  }
  const double fake_prob =
      std::norm(fake[static_cast<std::size_t>(outcomes[target_slot])]);

  return label_prob * joint_prob * fake_prob;
}

}  // namespace

int HashLeakAdversary::infer_tag_bit(const proto::RunContext& ctx, int l) {
  proto::PositionState& pos = ctx.positions[l];
  const int m = ctx.config.parties;
  const MeasurementBasis check_basis = ctx.basis_of_position[l];
  const MeasurementBasis conjugate =
      check_basis == MeasurementBasis::Computational
          ? MeasurementBasis::XBasis
          : MeasurementBasis::Computational;

  MeasurementRecord rec = measure(pos.psi, {pos.eve_qubit}, conjugate, ctx.rng);
  pos.psi = std::move(rec.post_state);
  const int eve_outcome = rec.outcomes[0];

  double like[2];
  for (int b = 0; b < 2; ++b) {
    like[b] = tag_hypothesis_likelihood(b, m, target_ - 1, pos.announced,
                                        check_basis, ctx.outcomes_of_position[l],
                                        eve_outcome);
  }
  const double tol = 1e-9 * std::max(like[0], like[1]);
  return like[1] > like[0] + tol ? 1 : 0;
}

void HashLeakAdversary::finalize(const proto::RunContext& ctx,
                                 proto::RunReport& report) {
  const int m = ctx.config.parties;
  const int L = ctx.config.total_positions();
  const proto::BitString& truth = ctx.tags[target_ - 1];

  int checked = 0, checked_correct = 0;
  int unchecked = 0, unchecked_correct = 0;
  const bool have_rounds =
      ctx.round_of_position.size() == static_cast<std::size_t>(L);
  for (int l = 0; l < L; ++l) {
    const bool disclosed =
        have_rounds && ctx.round_of_position[l] >= 0 &&
        ctx.outcomes_of_position[l].size() == static_cast<std::size_t>(m) &&
        ctx.positions[l].eve_qubit >= 0;
    int guess = 0;
    if (disclosed) {
      guess = infer_tag_bit(ctx, l);
      ++checked;
      checked_correct += guess == truth[l] ? 1 : 0;
    } else {
      ++unchecked;
      unchecked_correct += guess == truth[l] ? 1 : 0;
    }
  }

  json stats{{"kind", kind_name(AttackKind::HashLeakInterceptResend)},
             {"target", target_},
             {"suppress_first_detection", suppress_},
             {"positions", L},
             {"checked_positions", checked},
             {"checked_correct", checked_correct},
             {"unchecked_positions", unchecked},
             {"unchecked_correct", unchecked_correct},
             {"accuracy_overall",
              static_cast<double>(checked_correct + unchecked_correct) / L}};
  if (checked > 0) {
    stats["accuracy_checked"] = static_cast<double>(checked_correct) / checked;
  }
  report.attack_stats = std::move(stats);
}

std::vector<int> DishonestPartyAdversary::key_measurement_order(
    int parties) const {
  std::vector<int> order;
  order.reserve(parties);
  for (int p : parties_) order.push_back(p - 1);
  std::sort(order.begin(), order.end());
  for (int slot = 0; slot < parties; ++slot) {
    if (std::find(order.begin(), order.end(), slot) == order.end()) {
      order.push_back(slot);
    }
  }
  return order;
}

void DishonestPartyAdversary::finalize(const proto::RunContext& ctx,
                                       proto::RunReport& report) {
  json stats{{"kind", label_},
             {"parties", parties_},
             {"target_bit", target_bit_},
             {"target_position", target_position_}};
  if (report.passed && !ctx.keys.empty() &&
      target_position_ < static_cast<int>(ctx.keys[0].size())) {
    const int achieved = ctx.keys[parties_.front() - 1][target_position_];
    stats["achieved_bit"] = achieved;
    stats["forced"] = achieved == target_bit_;
  }
  report.attack_stats = std::move(stats);
}

bool ProductSourceAdversary::tp_prepare(int l,
                                        const proto::ProtocolConfig& cfg,
                                        const std::vector<proto::BitString>& tags,
                                        RandomStream& rng,
                                        proto::PositionState& out) {
  const int m = cfg.parties;
  out.psi = make_basis_state(m, 0);
  for (int i = 0; i < m; ++i) {
    if (tags[i][l]) apply_gate(out.psi, GateKind::Hadamard, i);
  }
  out.holder.resize(m);
  for (int i = 0; i < m; ++i) out.holder[i] = i;
  out.announced = GhzLabel(std::vector<uint8_t>(m, 0));
  out.announced.bits[0] = static_cast<uint8_t>(rng.bit());
  return true;
}

void ProductSourceAdversary::finalize(const proto::RunContext& ctx,
                                      proto::RunReport& report) {
  json stats{{"kind", kind_name(AttackKind::TpProductState)}};
  if (report.passed && !ctx.keys.empty()) {
    const std::size_t n = ctx.keys[0].size();
    stats["tp_key_guess"] = std::string(n, '0');
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
      hits += ctx.keys[0][k] == 0 ? 1 : 0;
    }
    stats["guess_accuracy"] =
        n == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(n);
    stats["guess_exact"] = hits == n;
  }
  report.attack_stats = std::move(stats);
}

StateVector canonical_entangled_source(const AncillaPair& ancilla,
                                       int parties) {
  const int anc = ancilla.theta0.num_qubits();
  StateVector psi(parties + anc);
  psi[0] = 0.0;
  const double s = std::sqrt(0.5);
  const std::size_t ones_block = ((std::size_t{1} << parties) - 1) << anc;
  for (std::size_t j = 0; j < ancilla.theta0.dim(); ++j) {
    psi[j] += s * ancilla.theta0[j];
    psi[ones_block | j] += s * ancilla.theta1[j];
  }
  return psi;
}

bool EntanglingSourceAdversary::tp_prepare(
    int l, const proto::ProtocolConfig& cfg,
    const std::vector<proto::BitString>& tags, RandomStream& rng,
    proto::PositionState& out) {
  const int m = cfg.parties;
  const int anc = ancilla_.theta0.num_qubits();
  const int phase_bit = rng.bit();

  out.psi = canonical_entangled_source(ancilla_, m);
  if (phase_bit) {
    // Fold the announced phase into the |1...1> branch so the honest Z^{u1}
    // correction restores the canonical source.
    const std::size_t ones_block = ((std::size_t{1} << m) - 1) << anc;
    for (std::size_t j = 0; j < ancilla_.theta1.dim(); ++j) {
      out.psi[ones_block | j] = -out.psi[ones_block | j];
    }
  }
  for (int i = 0; i < m; ++i) {
    if (tags[i][l]) apply_gate(out.psi, GateKind::Hadamard, i);
  }

  out.holder.resize(m);
  for (int i = 0; i < m; ++i) out.holder[i] = i;
  out.ancilla.resize(anc);
  for (int j = 0; j < anc; ++j) out.ancilla[j] = m + j;
  out.announced = GhzLabel(std::vector<uint8_t>(m, 0));
  out.announced.bits[0] = static_cast<uint8_t>(phase_bit);
  return true;
}

void EntanglingSourceAdversary::finalize(const proto::RunContext& ctx,
                                         proto::RunReport& report) {
  const int m = ctx.config.parties;
  const EntanglingRates rates = tp_entangling_rates(ancilla_, m);
  json stats{{"kind", kind_name(AttackKind::TpEntangling)},
             {"overlap", std::abs(ancilla_.overlap())},
             {"x_basis_error_rate", rates.x_basis_error_rate},
             {"tp_guess_advantage", rates.tp_guess_advantage}};

  if (report.passed && !ctx.keys.empty()) {
    const std::size_t n = ctx.keys[0].size();
    std::size_t correct = 0;
    for (std::size_t k = 0; k < n; ++k) {
      proto::PositionState& pos = ctx.positions[ctx.key_positions[k]];
      std::vector<int> qubits(m);
      std::vector<int> outs(m);
      for (int i = 0; i < m; ++i) {
        qubits[i] = pos.holder[i];
        outs[i] = ctx.keys[i][k];
      }
      StateVector residual =
          project_and_drop(pos.psi, qubits, MeasurementBasis::Computational,
                           outs)
              .second;
      const int guess =
          helstrom_guess(residual, ancilla_.theta0, ancilla_.theta1, ctx.rng);
      correct += guess == ctx.keys[0][k] ? 1 : 0;
    }
    stats["guessed_positions"] = n;
    stats["guess_correct"] = correct;
    if (n > 0) {
      stats["guess_accuracy"] =
          static_cast<double>(correct) / static_cast<double>(n);
    }
  }
  report.attack_stats = std::move(stats);
}

std::optional<int> ImpersonationAdversary::party_encoding_bit(
    int party, int l, RandomStream& rng) {
  if (party != target_) return std::nullopt;
  if (static_cast<int>(guesses_.size()) <= l) guesses_.resize(l + 1, -1);
  guesses_[l] = rng.bit();
  return guesses_[l];
}

std::optional<GateKind> ImpersonationAdversary::party_correction(
    int party, int l, const GhzLabel& label, RandomStream& rng) {
  (void)l, (void)label;
  if (party != target_ || !random_correction_) return std::nullopt;
  return rng.bit() ? GateKind::PauliX : GateKind::Identity;
}

void ImpersonationAdversary::finalize(const proto::RunContext& ctx,
                                      proto::RunReport& report) {
  const proto::BitString& truth = ctx.tags[target_ - 1];
  int guessed = 0, wrong = 0;
  for (std::size_t l = 0; l < guesses_.size(); ++l) {
    if (guesses_[l] < 0) continue;
    ++guessed;
    wrong += guesses_[l] != truth[l] ? 1 : 0;
  }
  json stats{{"kind", kind_name(AttackKind::Impersonation)},
             {"target", target_},
             {"correction", random_correction_ ? "random" : "honest"},
             {"guessed_positions", guessed},
             {"wrong_guesses", wrong}};
  if (guessed > 0) {
    stats["wrong_rate"] = static_cast<double>(wrong) / guessed;
  }
  report.attack_stats = std::move(stats);
}

int helstrom_guess(const StateVector& state, const StateVector& theta0,
                   const StateVector& theta1, RandomStream& rng) {
  const amp_t a = inner_product(theta0, theta1);
  const double b = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
  if (b < 1e-12) return rng.bit();

  // Work in the orthonormal frame e0 = theta0, e1 = (theta1 - a e0)/b where
  // rho0 - rho1 = [[1-|a|^2, -a b], [-conj(a) b, -b^2]] with eigenvalues
  // +-b.  Guessing 0 means projecting onto the +b eigenvector.
  const amp_t m00{1.0 - std::norm(a), 0.0};
  const amp_t m01 = -a * b;
  const amp_t m10 = -std::conj(a) * b;
  const amp_t m11{-b * b, 0.0};
  amp_t v0 = m01;
  amp_t v1 = amp_t{b, 0.0} - m00;
  double vn = std::sqrt(std::norm(v0) + std::norm(v1));
  if (vn < 1e-12) {
    v0 = amp_t{b, 0.0} - m11;
    v1 = m10;
    vn = std::sqrt(std::norm(v0) + std::norm(v1));
  }
  v0 /= vn;
  v1 /= vn;

  const amp_t c0 = inner_product(theta0, state);
  const amp_t c1 = (inner_product(theta1, state) - std::conj(a) * c0) / b;
  const double in_plane = std::norm(c0) + std::norm(c1);
  if (in_plane < 1e-12) return rng.bit();
  const amp_t overlap = std::conj(v0) * c0 + std::conj(v1) * c1;
  const double p_guess0 =
      std::min(1.0, std::max(0.0, std::norm(overlap) / in_plane));
  return rng.u01() < p_guess0 ? 0 : 1;
}

EntanglingRates tp_entangling_rates(const AncillaPair& ancilla, int parties) {
  ancilla.validate();
  const StateVector alpha = canonical_entangled_source(ancilla, parties);
  std::vector<int> party_qubits(parties);
  for (int i = 0; i < parties; ++i) party_qubits[i] = i;

  EntanglingRates rates;
  const std::vector<double> xdist =
      outcome_distribution(alpha, party_qubits, MeasurementBasis::XBasis);
  for (std::size_t o = 0; o < xdist.size(); ++o) {
    if (std::popcount(o) % 2 == 1) rates.x_basis_error_rate += xdist[o];
  }

  const StateVector anc0 =
      project_and_drop(alpha, party_qubits, MeasurementBasis::Computational,
                       std::vector<int>(parties, 0))
          .second;
  const StateVector anc1 =
      project_and_drop(alpha, party_qubits, MeasurementBasis::Computational,
                       std::vector<int>(parties, 1))
          .second;
  const double ov = std::abs(inner_product(anc0, anc1));
  rates.tp_guess_advantage = 0.5 * std::sqrt(std::max(0.0, 1.0 - ov * ov));
  return rates;
}

std::unique_ptr<proto::Adversary> make_adversary(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::ExternalInterceptResend:
      return std::make_unique<InterceptResendAdversary>(
          spec.target, spec.per_decoy_probability);
    case AttackKind::HashLeakInterceptResend:
      return std::make_unique<HashLeakAdversary>(spec.target,
                                                 spec.suppress_first_detection);
    case AttackKind::DishonestParticipant:
      return std::make_unique<DishonestPartyAdversary>(
          kind_name(spec.kind), std::vector<int>{spec.target}, spec.target_bit,
          spec.target_position);
    case AttackKind::CollusiveParticipants:
      return std::make_unique<DishonestPartyAdversary>(
          kind_name(spec.kind), spec.colluders, spec.target_bit,
          spec.target_position);
    case AttackKind::TpProductState:
      return std::make_unique<ProductSourceAdversary>();
    case AttackKind::TpEntangling:
      return std::make_unique<EntanglingSourceAdversary>(spec.ancilla);
    case AttackKind::Impersonation:
      return std::make_unique<ImpersonationAdversary>(
          spec.target, spec.correction == "random");
  }
  throw std::invalid_argument("attack.kind: unknown");
}

}  // namespace qka::attack
