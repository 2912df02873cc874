#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qka {

using amp_t = std::complex<double>;

// Dense state vector over `num_qubits` qubits.
//
// Qubit 0 is the leftmost symbol in ket notation and therefore the most
// significant bit of the amplitude index: |q0 q1 ... q_{n-1}> lives at index
// q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.  With that convention the tensor
// product concatenates ket strings left to right.
class StateVector {
 public:
  StateVector() = default;
  // Initializes |0...0>.
  explicit StateVector(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  amp_t& operator[](std::size_t i) { return amps_[i]; }
  const amp_t& operator[](std::size_t i) const { return amps_[i]; }
  const std::vector<amp_t>& amplitudes() const { return amps_; }
  std::vector<amp_t>& amplitudes() { return amps_; }

  double norm() const;
  void normalize();

  // Value of qubit q in basis index i under the ordering above.
  bool bit(std::size_t index, int qubit) const {
    return (index >> (num_qubits_ - 1 - qubit)) & 1u;
  }

 private:
  int num_qubits_ = 0;
  std::vector<amp_t> amps_;
};

// Single-qubit gate set used by the protocol: the two encoding choices
// (identity and Hadamard) and the correction operators.  PauliIY denotes
// iY = |0><1| - |1><0|, the real-matrix representative of the Y correction.
enum class GateKind { Identity, PauliX, PauliZ, PauliIY, Hadamard };

struct GateMatrix {
  amp_t m00, m01, m10, m11;
};

GateMatrix gate_matrix(GateKind kind);
const char* gate_name(GateKind kind);

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

// Label of an m-qubit generalized Bell (GHZ-class) state
//
//   |phi_u> = (|0, u2, ..., um> + (-1)^{u1} |1, ~u2, ..., ~um>) / sqrt(2).
//
// bits[0] is the phase bit u1; bits[1..] are the flip bits.  Labels order
// lexicographically, bits[0] most significant, giving index values
// 0 .. 2^m - 1.
struct GhzLabel {
  std::vector<uint8_t> bits;

  GhzLabel() = default;
  explicit GhzLabel(std::vector<uint8_t> b) : bits(std::move(b)) {}
  static GhzLabel from_index(int m, std::size_t index);

  int size() const { return static_cast<int>(bits.size()); }
  std::size_t to_index() const;
  std::string to_string() const;

  bool operator==(const GhzLabel& other) const { return bits == other.bits; }
};

// |0>/|1> at a given qubit count (value packs the full basis index).
StateVector make_basis_state(int num_qubits, std::size_t basis_index);

StateVector bell_pair(BellKind kind);
StateVector ghz_state(const GhzLabel& label);

// Applies a single-qubit gate in place.
void apply_gate(StateVector& state, GateKind kind, int qubit);
void apply_gate(StateVector& state, const GateMatrix& m, int qubit);

// <a|b>; both states must hold the same qubit count.
amp_t inner_product(const StateVector& a, const StateVector& b);

// Kronecker product; qubits of `a` precede qubits of `b`.
StateVector tensor(const StateVector& a, const StateVector& b);

// |<a|b>| within tol, i.e. equality up to a global phase.
bool equal_up_to_phase(const StateVector& a, const StateVector& b,
                       double tol = 1e-12);

}  // namespace qka
