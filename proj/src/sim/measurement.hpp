#pragma once

#include <utility>
#include <vector>

#include "sim/random_stream.hpp"
#include "sim/state_vector.hpp"

namespace qka {

// Computational = {|0>,|1>} per qubit; XBasis = {|+>,|->} with outcome 0
// mapping to |+>.  XBasis is realized by Hadamard conjugation.
enum class MeasurementBasis { Computational, XBasis };

struct MeasurementRecord {
  MeasurementBasis basis = MeasurementBasis::Computational;
  std::vector<int> qubits;
  std::vector<int> outcomes;  // one 0/1 entry per measured qubit
  double probability = 0.0;   // joint Born probability of `outcomes`
  StateVector post_state;     // collapsed state, same qubit count as input
};

struct GhzMeasurementRecord {
  std::vector<int> qubits;
  GhzLabel label;
  double probability = 0.0;
  StateVector post_state;
};

// Projective measurement of a qubit subset.  Outcomes are sampled from the
// joint Born distribution; the post state is renormalized, so repeating the
// measurement reproduces the outcome with probability 1.
MeasurementRecord measure(const StateVector& state,
                          const std::vector<int>& qubits,
                          MeasurementBasis basis, RandomStream& rng);

// Joint outcome distribution of measuring `qubits` in `basis`; entry index
// packs the per-qubit bits with qubits[0] most significant.
std::vector<double> outcome_distribution(const StateVector& state,
                                         const std::vector<int>& qubits,
                                         MeasurementBasis basis);

// Deterministic projection onto a specific outcome; returns the Born
// probability and the normalized collapsed state (null state when the
// probability is 0).
std::pair<double, StateVector> project_outcome(
    const StateVector& state, const std::vector<int>& qubits,
    MeasurementBasis basis, const std::vector<int>& outcomes);

// Measurement in the generalized Bell basis {|phi_u>} on an m-qubit subset,
// implemented as the projector family indexed by the 2^m labels.  The post
// state leaves `qubits` exactly in |phi_label> with the rest collapsed.
GhzMeasurementRecord measure_ghz_basis(const StateVector& state,
                                       const std::vector<int>& qubits,
                                       RandomStream& rng);

// Probability of each label in measure_ghz_basis, indexed by label index.
std::vector<double> ghz_distribution(const StateVector& state,
                                     const std::vector<int>& qubits);

// Projects `qubits` onto <phi_label| and returns the Born probability plus
// the normalized residual state on the remaining qubits (kept in ascending
// original order).  This is the contraction the entanglement swap uses.
std::pair<double, StateVector> ghz_project(const StateVector& state,
                                           const std::vector<int>& qubits,
                                           const GhzLabel& label);

// Projects `qubits` onto the given outcomes in `basis` and removes them,
// returning the Born probability and the normalized state on the remaining
// qubits (ascending original order).
std::pair<double, StateVector> project_and_drop(const StateVector& state,
                                                const std::vector<int>& qubits,
                                                MeasurementBasis basis,
                                                const std::vector<int>& outcomes);

}  // namespace qka
