#include "protocol/decoy.hpp"

#include <algorithm>
#include <stdexcept>

namespace qka::proto {

MeasurementBasis decoy_basis(DecoyState s) {
  return (s == DecoyState::Zero || s == DecoyState::One)
             ? MeasurementBasis::Computational
             : MeasurementBasis::XBasis;
}

int decoy_value(DecoyState s) {
  return (s == DecoyState::One || s == DecoyState::Minus) ? 1 : 0;
}

StateVector decoy_qubit(DecoyState s) {
  StateVector q(1);
  switch (s) {
    case DecoyState::Zero:
      break;
    case DecoyState::One:
      q = make_basis_state(1, 1);
      break;
    case DecoyState::Plus:
      apply_gate(q, GateKind::Hadamard, 0);
      break;
    case DecoyState::Minus:
      q = make_basis_state(1, 1);
      apply_gate(q, GateKind::Hadamard, 0);
      break;
  }
  return q;
}

DecoyRecord transmit_with_decoys(int channel, int signal_count, int zeta,
                                 RandomStream& rng) {
  if (zeta < 1) throw std::invalid_argument("zeta: need at least one decoy");
  if (signal_count < 0) throw std::invalid_argument("negative signal count");

  const int total = signal_count + zeta;
  // Partial Fisher-Yates over the slot indices picks zeta distinct slots.
  std::vector<int> slots(total);
  for (int i = 0; i < total; ++i) slots[i] = i;
  for (int i = 0; i < zeta; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(total - i));
    std::swap(slots[i], slots[j]);
  }
  slots.resize(zeta);
  std::sort(slots.begin(), slots.end());

  DecoyRecord record;
  record.channel = channel;
  record.slots = std::move(slots);
  record.prepared.reserve(zeta);
  record.qubits.reserve(zeta);
  for (int i = 0; i < zeta; ++i) {
    const auto s = static_cast<DecoyState>(rng.uniform_below(4));
    record.prepared.push_back(s);
    record.qubits.push_back(decoy_qubit(s));
  }
  return record;
}

std::pair<int, int> check_decoys(DecoyRecord& record, RandomStream& rng) {
  const std::size_t count = record.prepared.size();
  if (record.qubits.size() != count) {
    throw std::invalid_argument("decoy record out of sync");
  }
  record.bases.clear();
  record.outcomes.clear();
  int errors = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const MeasurementBasis basis = decoy_basis(record.prepared[i]);
    const MeasurementRecord m = measure(record.qubits[i], {0}, basis, rng);
    record.bases.push_back(basis);
    record.outcomes.push_back(m.outcomes[0]);
    record.qubits[i] = m.post_state;
    if (m.outcomes[0] != decoy_value(record.prepared[i])) ++errors;
  }
  return {errors, static_cast<int>(count)};
}

}  // namespace qka::proto
