#include "protocol/run.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qka::proto {

namespace {

Adversary& honest_behavior() {
  static Adversary honest;
  return honest;
}

bool z_round_error(const std::vector<int>& outcomes) {
  for (int o : outcomes) {
    if (o != outcomes.front()) return true;
  }
  return false;
}

bool x_round_error(const std::vector<int>& outcomes) {
  int minus_count = 0;
  for (int o : outcomes) minus_count += o;
  return (minus_count % 2) != 0;
}

}  // namespace

StateVector tp_prepare_position(int parties) {
  if (parties < 1) throw std::invalid_argument("parties: must be positive");
  StateVector state = bell_pair(BellKind::PhiPlus);
  for (int i = 1; i < parties; ++i) {
    state = tensor(state, bell_pair(BellKind::PhiPlus));
  }
  return state;
}

void apply_auth_encoding(StateVector& position, const std::vector<int>& tp_bits,
                         const std::vector<int>& party_bits) {
  const std::size_t m = tp_bits.size();
  if (party_bits.size() != m) {
    throw std::invalid_argument("encoding bit count mismatch");
  }
  if (position.num_qubits() != static_cast<int>(2 * m)) {
    throw std::invalid_argument("position state must hold 2m qubits");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (tp_bits[i]) apply_gate(position, GateKind::Hadamard, 2 * i);
    if (party_bits[i]) apply_gate(position, GateKind::Hadamard, 2 * i + 1);
  }
}

std::pair<GhzLabel, StateVector> swap_and_correct(const StateVector& position,
                                                  RandomStream& rng) {
  if (position.num_qubits() % 2 != 0) {
    throw std::invalid_argument("position state must hold 2m qubits");
  }
  const int m = position.num_qubits() / 2;
  std::vector<int> tp_qubits(m);
  for (int i = 0; i < m; ++i) tp_qubits[i] = 2 * i;

  const std::vector<double> dist = ghz_distribution(position, tp_qubits);
  const GhzLabel label = GhzLabel::from_index(m, rng.sample_discrete(dist));
  StateVector participants = ghz_project(position, tp_qubits, label).second;

  if (label.bits[0]) apply_gate(participants, GateKind::PauliZ, 0);
  for (int i = 1; i < m; ++i) {
    if (label.bits[i]) apply_gate(participants, GateKind::PauliX, i);
  }
  return {label, std::move(participants)};
}

RunReport run_protocol(const ProtocolConfig& config, Adversary* adversary,
                       RandomStream& rng) {
  return ProtocolEngine(config, adversary, rng).run();
}

ProtocolEngine::ProtocolEngine(const ProtocolConfig& config,
                               Adversary* adversary, RandomStream& rng)
    : config_(config),
      adversary_(adversary != nullptr ? adversary : &honest_behavior()),
      rng_(rng) {
  config.validate();
}

RunReport ProtocolEngine::run() {
  setup_identities();
  prepare_positions();
  if (first_detection()) {
    encode();
    swap_and_announce();
    apply_corrections();
    if (second_detection()) {
      extract_keys();
    }
  }
  return finish();
}

void ProtocolEngine::setup_identities() {
  const int m = config_.parties;
  parties_.clear();
  parties_.reserve(m);
  for (int i = 1; i <= m; ++i) {
    parties_.push_back(PartyIdentity::generate("P" + std::to_string(i), rng_));
  }
  tp_nonce_ = rng_.bytes(16);

  const int length = config_.total_positions();
  tags_.clear();
  tags_.reserve(m);
  for (const PartyIdentity& p : parties_) {
    tags_.push_back(derive_auth_tag(p, tp_nonce_, length));
  }

  transcript_ = Transcript{};
  transcript_.hash_function = kHashFunctionId;
  transcript_.tp_nonce = to_hex(tp_nonce_);
  for (const PartyIdentity& p : parties_) {
    transcript_.party_ids.push_back(p.id);
    transcript_.party_nonces.push_back(to_hex(p.nonce));
  }
}

void ProtocolEngine::prepare_positions() {
  const int m = config_.parties;
  const int L = config_.total_positions();
  positions_.clear();
  positions_.reserve(L);
  for (int l = 0; l < L; ++l) {
    PositionState pos;
    if (!adversary_->tp_prepare(l, config_, tags_, rng_, pos)) {
      pos = PositionState{};
      pos.psi = tp_prepare_position(m);
      pos.tp_qubit.resize(m);
      pos.holder.resize(m);
      for (int i = 0; i < m; ++i) {
        pos.tp_qubit[i] = 2 * i;
        pos.holder[i] = 2 * i + 1;
      }
    }
    pos.fakes.resize(m);
    for (int party = 1; party <= m; ++party) {
      adversary_->on_transmit(party, l, pos, rng_);
    }
    positions_.push_back(std::move(pos));
  }
}

bool ProtocolEngine::first_detection() {
  if (config_.zeta == 0 || adversary_->skip_first_detection()) return true;
  const int L = config_.total_positions();
  for (int channel = 1; channel <= config_.parties; ++channel) {
    DecoyRecord record = transmit_with_decoys(channel, L, config_.zeta, rng_);
    for (StateVector& qubit : record.qubits) {
      adversary_->on_decoy(channel, qubit, rng_);
    }
    const auto [errors, checked] = check_decoys(record, rng_);
    first_detection_errors_ += errors;

    DecoyDisclosure disclosure;
    disclosure.channel = channel;
    disclosure.slots = record.slots;
    for (MeasurementBasis b : record.bases) {
      disclosure.bases.push_back(b == MeasurementBasis::Computational ? 'z'
                                                                      : 'x');
    }
    disclosure.outcomes = record.outcomes;
    disclosure.errors = errors;
    transcript_.decoy_checks.push_back(std::move(disclosure));

    if (static_cast<double>(errors) / checked > config_.error_threshold) {
      abort("decoy check failed on channel " + std::to_string(channel));
      return false;
    }
  }
  return true;
}

void ProtocolEngine::encode() {
  const int m = config_.parties;
  const int L = config_.total_positions();
  for (int l = 0; l < L; ++l) {
    PositionState& pos = positions_[l];
    for (int party = 1; party <= m; ++party) {
      const int tag_bit = tags_[party - 1][l];
      if (!pos.tp_qubit.empty() && tag_bit) {
        apply_gate(pos.psi, GateKind::Hadamard, pos.tp_qubit[party - 1]);
      }
      const int party_bit =
          adversary_->party_encoding_bit(party, l, rng_).value_or(tag_bit);
      if (party_bit) {
        apply_party_gate(pos, party, GateKind::Hadamard);
      }
    }
  }
}

void ProtocolEngine::swap_and_announce() {
  const int L = config_.total_positions();
  for (int l = 0; l < L; ++l) {
    PositionState& pos = positions_[l];
    if (!pos.tp_qubit.empty()) {
      const int m = static_cast<int>(pos.tp_qubit.size());
      const std::vector<double> dist = ghz_distribution(pos.psi, pos.tp_qubit);
      const GhzLabel label =
          GhzLabel::from_index(m, rng_.sample_discrete(dist));
      pos.psi = ghz_project(pos.psi, pos.tp_qubit, label).second;

      // Dropping the measured qubits shifts every surviving index down by
      // the number of measured qubits before it.
      auto reindex = [&](int q) {
        int shift = 0;
        for (int t : pos.tp_qubit) {
          if (t < q) ++shift;
        }
        return q - shift;
      };
      for (int& h : pos.holder) {
        if (h >= 0) h = reindex(h);
      }
      for (int& a : pos.ancilla) a = reindex(a);
      if (pos.eve_qubit >= 0) pos.eve_qubit = reindex(pos.eve_qubit);
      pos.tp_qubit.clear();
      pos.announced = label;
    }
    transcript_.announced_labels.push_back(pos.announced.to_string());
  }
}

void ProtocolEngine::apply_corrections() {
  const int m = config_.parties;
  const int L = config_.total_positions();
  for (int l = 0; l < L; ++l) {
    PositionState& pos = positions_[l];
    for (int party = 1; party <= m; ++party) {
      const int label_bit = pos.announced.bits[party - 1];
      const GateKind honest =
          label_bit ? (party == 1 ? GateKind::PauliZ : GateKind::PauliX)
                    : GateKind::Identity;
      const GateKind gate =
          adversary_->party_correction(party, l, pos.announced, rng_)
              .value_or(honest);
      apply_party_gate(pos, party, gate);
    }
  }
}

bool ProtocolEngine::second_detection() {
  const int m = config_.parties;
  const int L = config_.total_positions();
  const int delta = config_.delta;

  std::vector<int> perm(L);
  for (int l = 0; l < L; ++l) perm[l] = l;
  for (int i = L - 1; i > 0; --i) {
    const int j = static_cast<int>(rng_.uniform_below(i + 1));
    std::swap(perm[i], perm[j]);
  }

  round_of_position_.assign(L, -1);
  basis_of_position_.assign(L, MeasurementBasis::Computational);
  outcomes_of_position_.assign(L, {});
  key_positions_.assign(perm.begin() + m * delta, perm.end());
  std::sort(key_positions_.begin(), key_positions_.end());

  bool failed = false;
  for (int round = 0; round < m && !failed; ++round) {
    std::vector<int> chosen(perm.begin() + round * delta,
                            perm.begin() + (round + 1) * delta);
    std::sort(chosen.begin(), chosen.end());

    DetectionDisclosure disclosure;
    disclosure.initiator = round + 1;
    disclosure.positions = chosen;
    int errors = 0;
    for (int l : chosen) {
      const MeasurementBasis basis =
          rng_.bit() ? MeasurementBasis::XBasis : MeasurementBasis::Computational;
      std::vector<int> outcomes(m);
      for (int party = 1; party <= m; ++party) {
        outcomes[party - 1] = measure_party(positions_[l], party, basis);
      }
      const bool error = basis == MeasurementBasis::Computational
                             ? z_round_error(outcomes)
                             : x_round_error(outcomes);
      errors += error ? 1 : 0;

      round_of_position_[l] = round;
      basis_of_position_[l] = basis;
      outcomes_of_position_[l] = outcomes;
      disclosure.bases.push_back(
          basis == MeasurementBasis::Computational ? 'z' : 'x');
      disclosure.outcomes.push_back(std::move(outcomes));
    }
    disclosure.errors = errors;
    second_detection_errors_ += errors;
    transcript_.detection_rounds.push_back(std::move(disclosure));

    if (static_cast<double>(errors) / delta > config_.error_threshold) {
      abort("detection round " + std::to_string(round + 1) + " failed");
      failed = true;
    }
  }
  return !failed;
}

void ProtocolEngine::extract_keys() {
  const int m = config_.parties;
  const std::vector<int> order = adversary_->key_measurement_order(m);
  if (order.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("measurement order must list every party");
  }
  keys_.assign(m, BitString(key_positions_.size(), 0));
  for (std::size_t k = 0; k < key_positions_.size(); ++k) {
    PositionState& pos = positions_[key_positions_[k]];
    for (int slot : order) {
      keys_[slot][k] = static_cast<uint8_t>(
          measure_party(pos, slot + 1, MeasurementBasis::Computational));
    }
  }
}

RunReport ProtocolEngine::finish() {
  RunReport report;
  report.passed = !aborted_;
  report.first_detection_errors = first_detection_errors_;
  report.second_detection_errors = second_detection_errors_;
  if (!aborted_) {
    for (const BitString& key : keys_) {
      report.keys.push_back(bits_to_string(key));
    }
  }
  report.transcript = transcript_;

  RunContext ctx{config_,         parties_,           tags_,
                 positions_,      transcript_,        round_of_position_,
                 basis_of_position_, outcomes_of_position_, key_positions_,
                 keys_,           rng_};
  adversary_->finalize(ctx, report);
  return report;
}

int ProtocolEngine::measure_party(PositionState& pos, int party,
                                  MeasurementBasis basis) {
  const int slot = party - 1;
  if (pos.holder[slot] >= 0) {
    MeasurementRecord rec = measure(pos.psi, {pos.holder[slot]}, basis, rng_);
    pos.psi = std::move(rec.post_state);
    return rec.outcomes[0];
  }
  MeasurementRecord rec = measure(pos.fakes[slot], {0}, basis, rng_);
  pos.fakes[slot] = std::move(rec.post_state);
  return rec.outcomes[0];
}

void ProtocolEngine::apply_party_gate(PositionState& pos, int party,
                                      GateKind gate) {
  if (gate == GateKind::Identity) return;
  const int slot = party - 1;
  if (pos.holder[slot] >= 0) {
    apply_gate(pos.psi, gate, pos.holder[slot]);
  } else {
    apply_gate(pos.fakes[slot], gate, 0);
  }
}

void ProtocolEngine::abort(std::string reason) {
  aborted_ = true;
  transcript_.abort_reason = std::move(reason);
}

}  // namespace qka::proto
