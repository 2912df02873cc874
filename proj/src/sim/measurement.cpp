#include "sim/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace qka {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Builds a full basis index by placing packed bits (entry j of `positions`
// taking bit j, MSB first) at the named qubit positions.
std::size_t scatter_bits(const std::vector<int>& positions, int num_qubits,
                         std::size_t packed) {
  std::size_t idx = 0;
  const std::size_t k = positions.size();
  for (std::size_t j = 0; j < k; ++j) {
    if ((packed >> (k - 1 - j)) & 1u) {
      idx |= std::size_t{1} << (num_qubits - 1 - positions[j]);
    }
  }
  return idx;
}

void check_qubits(const StateVector& state, const std::vector<int>& qubits) {
  std::size_t seen = 0;
  for (int q : qubits) {
    if (q < 0 || q >= state.num_qubits()) {
      throw std::invalid_argument("measured qubit out of range");
    }
    const std::size_t bit = std::size_t{1} << q;
    if (seen & bit) throw std::invalid_argument("duplicate measured qubit");
    seen |= bit;
  }
}

std::vector<int> remaining_qubits(int num_qubits,
                                  const std::vector<int>& qubits) {
  std::vector<bool> taken(num_qubits, false);
  for (int q : qubits) taken[q] = true;
  std::vector<int> rest;
  rest.reserve(num_qubits - qubits.size());
  for (int q = 0; q < num_qubits; ++q) {
    if (!taken[q]) rest.push_back(q);
  }
  return rest;
}

StateVector hadamard_on_all(StateVector state, const std::vector<int>& qubits) {
  for (int q : qubits) apply_gate(state, GateKind::Hadamard, q);
  return state;
}

}  // namespace

std::vector<double> outcome_distribution(const StateVector& state,
                                         const std::vector<int>& qubits,
                                         MeasurementBasis basis) {
  check_qubits(state, qubits);
  const StateVector& work = (basis == MeasurementBasis::XBasis)
                                ? hadamard_on_all(state, qubits)
                                : state;
  std::vector<double> dist(std::size_t{1} << qubits.size(), 0.0);
  const std::size_t k = qubits.size();
  for (std::size_t i = 0; i < work.dim(); ++i) {
    std::size_t packed = 0;
    for (std::size_t j = 0; j < k; ++j) {
      packed |= static_cast<std::size_t>(work.bit(i, qubits[j])) << (k - 1 - j);
    }
    dist[packed] += std::norm(work[i]);
  }
  return dist;
}

std::pair<double, StateVector> project_outcome(
    const StateVector& state, const std::vector<int>& qubits,
    MeasurementBasis basis, const std::vector<int>& outcomes) {
  check_qubits(state, qubits);
  if (outcomes.size() != qubits.size()) {
    throw std::invalid_argument("outcome count mismatch");
  }
  StateVector work = (basis == MeasurementBasis::XBasis)
                         ? hadamard_on_all(state, qubits)
                         : state;
  double prob = 0.0;
  for (std::size_t i = 0; i < work.dim(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < qubits.size(); ++j) {
      if (work.bit(i, qubits[j]) != static_cast<bool>(outcomes[j])) {
        match = false;
        break;
      }
    }
    if (match) {
      prob += std::norm(work[i]);
    } else {
      work[i] = amp_t{0.0, 0.0};
    }
  }
  if (prob <= 0.0) {
    return {0.0, StateVector(state.num_qubits())};
  }
  const double scale = 1.0 / std::sqrt(prob);
  for (std::size_t i = 0; i < work.dim(); ++i) work[i] *= scale;
  if (basis == MeasurementBasis::XBasis) {
    work = hadamard_on_all(std::move(work), qubits);
  }
  return {prob, std::move(work)};
}

MeasurementRecord measure(const StateVector& state,
                          const std::vector<int>& qubits,
                          MeasurementBasis basis, RandomStream& rng) {
  std::vector<double> dist = outcome_distribution(state, qubits, basis);
  const std::size_t packed = rng.sample_discrete(dist);
  MeasurementRecord rec;
  rec.basis = basis;
  rec.qubits = qubits;
  rec.outcomes.resize(qubits.size());
  const std::size_t k = qubits.size();
  for (std::size_t j = 0; j < k; ++j) {
    rec.outcomes[j] = static_cast<int>((packed >> (k - 1 - j)) & 1u);
  }
  auto [prob, post] = project_outcome(state, qubits, basis, rec.outcomes);
  rec.probability = prob;
  rec.post_state = std::move(post);
  return rec;
}

std::pair<double, StateVector> ghz_project(const StateVector& state,
                                           const std::vector<int>& qubits,
                                           const GhzLabel& label) {
  check_qubits(state, qubits);
  const std::size_t m = qubits.size();
  if (m == 0 || label.bits.size() != m) {
    throw std::invalid_argument("label size must match measured qubit count");
  }
  const int n = state.num_qubits();
  const double sign = label.bits[0] ? -1.0 : 1.0;

  // The projector target |phi_label> has support on exactly two basis
  // strings: (0, u2..um) and (1, ~u2..~um).
  std::size_t packed0 = 0, packed1 = 0;
  packed1 |= std::size_t{1} << (m - 1);
  for (std::size_t j = 1; j < m; ++j) {
    if (label.bits[j]) packed0 |= std::size_t{1} << (m - 1 - j);
    if (!label.bits[j]) packed1 |= std::size_t{1} << (m - 1 - j);
  }
  const std::size_t base0 = scatter_bits(qubits, n, packed0);
  const std::size_t base1 = scatter_bits(qubits, n, packed1);

  const std::vector<int> rest = remaining_qubits(n, qubits);
  StateVector remainder(static_cast<int>(rest.size()));
  double prob = 0.0;
  for (std::size_t r = 0; r < remainder.dim(); ++r) {
    const std::size_t off = scatter_bits(rest, n, r);
    const amp_t v = (state[base0 | off] + sign * state[base1 | off]) * kInvSqrt2;
    remainder[r] = v;
    prob += std::norm(v);
  }
  if (prob <= 0.0) {
    return {0.0, StateVector(static_cast<int>(rest.size()))};
  }
  const double scale = 1.0 / std::sqrt(prob);
  for (std::size_t r = 0; r < remainder.dim(); ++r) remainder[r] *= scale;
  return {prob, std::move(remainder)};
}

std::pair<double, StateVector> project_and_drop(
    const StateVector& state, const std::vector<int>& qubits,
    MeasurementBasis basis, const std::vector<int>& outcomes) {
  check_qubits(state, qubits);
  if (outcomes.size() != qubits.size()) {
    throw std::invalid_argument("outcome count mismatch");
  }
  const StateVector& work = (basis == MeasurementBasis::XBasis)
                                ? hadamard_on_all(state, qubits)
                                : state;
  const int n = state.num_qubits();
  std::size_t packed = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    packed = (packed << 1) | static_cast<std::size_t>(outcomes[j] & 1);
  }
  const std::size_t base = scatter_bits(qubits, n, packed);
  const std::vector<int> rest = remaining_qubits(n, qubits);

  StateVector remainder(static_cast<int>(rest.size()));
  double prob = 0.0;
  for (std::size_t r = 0; r < remainder.dim(); ++r) {
    const amp_t v = work[base | scatter_bits(rest, n, r)];
    remainder[r] = v;
    prob += std::norm(v);
  }
  if (prob <= 0.0) {
    return {0.0, StateVector(static_cast<int>(rest.size()))};
  }
  const double scale = 1.0 / std::sqrt(prob);
  for (std::size_t r = 0; r < remainder.dim(); ++r) remainder[r] *= scale;
  return {prob, std::move(remainder)};
}

std::vector<double> ghz_distribution(const StateVector& state,
                                     const std::vector<int>& qubits) {
  const std::size_t labels = std::size_t{1} << qubits.size();
  std::vector<double> dist(labels);
  for (std::size_t u = 0; u < labels; ++u) {
    dist[u] =
        ghz_project(state, qubits, GhzLabel::from_index(qubits.size(), u))
            .first;
  }
  return dist;
}

GhzMeasurementRecord measure_ghz_basis(const StateVector& state,
                                       const std::vector<int>& qubits,
                                       RandomStream& rng) {
  std::vector<double> dist = ghz_distribution(state, qubits);
  const std::size_t u = rng.sample_discrete(dist);
  const GhzLabel label = GhzLabel::from_index(qubits.size(), u);
  auto [prob, remainder] = ghz_project(state, qubits, label);

  const int n = state.num_qubits();
  const std::size_t m = qubits.size();
  const double sign = label.bits[0] ? -1.0 : 1.0;
  std::size_t packed0 = 0, packed1 = 0;
  packed1 |= std::size_t{1} << (m - 1);
  for (std::size_t j = 1; j < m; ++j) {
    if (label.bits[j]) packed0 |= std::size_t{1} << (m - 1 - j);
    if (!label.bits[j]) packed1 |= std::size_t{1} << (m - 1 - j);
  }
  const std::size_t base0 = scatter_bits(qubits, n, packed0);
  const std::size_t base1 = scatter_bits(qubits, n, packed1);
  const std::vector<int> rest = remaining_qubits(n, qubits);

  GhzMeasurementRecord rec;
  rec.qubits = qubits;
  rec.label = label;
  rec.probability = prob;
  rec.post_state = StateVector(n);
  rec.post_state[0] = amp_t{0.0, 0.0};
  for (std::size_t r = 0; r < remainder.dim(); ++r) {
    const std::size_t off = scatter_bits(rest, n, r);
    rec.post_state[base0 | off] = kInvSqrt2 * remainder[r];
    rec.post_state[base1 | off] = sign * kInvSqrt2 * remainder[r];
  }
  return rec;
}

}  // namespace qka
