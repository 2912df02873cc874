#include "sim/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace qka {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > 30) {
    throw std::invalid_argument("qubit count out of range");
  }
  amps_.assign(std::size_t{1} << num_qubits, amp_t{0.0, 0.0});
  amps_[0] = amp_t{1.0, 0.0};
}

double StateVector::norm() const {
  double s = 0.0;
  for (const amp_t& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::normalize() {
  double n = norm();
  if (n == 0.0) throw std::runtime_error("cannot normalize null vector");
  for (amp_t& a : amps_) a /= n;
}

GateMatrix gate_matrix(GateKind kind) {
  switch (kind) {
    case GateKind::Identity:
      return {1.0, 0.0, 0.0, 1.0};
    case GateKind::PauliX:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::PauliZ:
      return {1.0, 0.0, 0.0, -1.0};
    case GateKind::PauliIY:
      return {0.0, 1.0, -1.0, 0.0};
    case GateKind::Hadamard:
      return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
  }
  throw std::invalid_argument("unknown gate kind");
}

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::Identity: return "I";
    case GateKind::PauliX: return "X";
    case GateKind::PauliZ: return "Z";
    case GateKind::PauliIY: return "iY";
    case GateKind::Hadamard: return "H";
  }
  return "?";
}

GhzLabel GhzLabel::from_index(int m, std::size_t index) {
  if (m < 1) throw std::invalid_argument("label needs at least one bit");
  if (index >= (std::size_t{1} << m)) {
    throw std::invalid_argument("label index out of range");
  }
  std::vector<uint8_t> bits(m);
  for (int j = 0; j < m; ++j) {
    bits[j] = static_cast<uint8_t>((index >> (m - 1 - j)) & 1u);
  }
  return GhzLabel(std::move(bits));
}

std::size_t GhzLabel::to_index() const {
  std::size_t idx = 0;
  for (uint8_t b : bits) idx = (idx << 1) | (b & 1u);
  return idx;
}

std::string GhzLabel::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (uint8_t b : bits) s.push_back(b ? '1' : '0');
  return s;
}

StateVector make_basis_state(int num_qubits, std::size_t basis_index) {
  StateVector state(num_qubits);
  if (basis_index >= state.dim()) {
    throw std::invalid_argument("basis index out of range");
  }
  state[0] = amp_t{0.0, 0.0};
  state[basis_index] = amp_t{1.0, 0.0};
  return state;
}

StateVector bell_pair(BellKind kind) {
  StateVector state(2);
  state[0] = amp_t{0.0, 0.0};
  switch (kind) {
    case BellKind::PhiPlus:
      state[0b00] = kInvSqrt2;
      state[0b11] = kInvSqrt2;
      break;
    case BellKind::PhiMinus:
      state[0b00] = kInvSqrt2;
      state[0b11] = -kInvSqrt2;
      break;
    case BellKind::PsiPlus:
      state[0b01] = kInvSqrt2;
      state[0b10] = kInvSqrt2;
      break;
    case BellKind::PsiMinus:
      state[0b01] = kInvSqrt2;
      state[0b10] = -kInvSqrt2;
      break;
  }
  return state;
}

StateVector ghz_state(const GhzLabel& label) {
  const int m = label.size();
  if (m < 1) throw std::invalid_argument("empty label");
  StateVector state(m);
  state[0] = amp_t{0.0, 0.0};

  std::size_t idx0 = 0, idx1 = 0;
  idx1 |= std::size_t{1} << (m - 1);
  for (int j = 1; j < m; ++j) {
    if (label.bits[j]) idx0 |= std::size_t{1} << (m - 1 - j);
    if (!label.bits[j]) idx1 |= std::size_t{1} << (m - 1 - j);
  }
  state[idx0] = kInvSqrt2;
  state[idx1] = label.bits[0] ? -kInvSqrt2 : kInvSqrt2;
  return state;
}

void apply_gate(StateVector& state, GateKind kind, int qubit) {
  apply_gate(state, gate_matrix(kind), qubit);
}

void apply_gate(StateVector& state, const GateMatrix& m, int qubit) {
  const int n = state.num_qubits();
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("qubit out of range");
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  const std::size_t dim = state.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const amp_t a0 = state[i];
    const amp_t a1 = state[i | mask];
    state[i] = m.m00 * a0 + m.m01 * a1;
    state[i | mask] = m.m10 * a0 + m.m11 * a1;
  }
}

amp_t inner_product(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("qubit count mismatch");
  }
  amp_t s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.num_qubits() + b.num_qubits());
  const std::size_t db = b.dim();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < db; ++j) {
      out[i * db + j] = a[i] * b[j];
    }
  }
  return out;
}

bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol) {
  return std::abs(std::abs(inner_product(a, b)) - 1.0) <= tol;
}

}  // namespace qka
