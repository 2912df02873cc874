#include "harness/identities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "protocol/run.hpp"
#include "sim/state_vector.hpp"

namespace qka::harness {

using nlohmann::json;

namespace {

double max_amp_diff(const StateVector& a, const StateVector& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dev = std::max(dev, std::abs(a[i] - b[i]));
  }
  return dev;
}

StateVector equal_superposition(const StateVector& a, const StateVector& b) {
  StateVector out = a;
  const double s = std::sqrt(0.5);
  for (std::size_t i = 0; i < out.dim(); ++i) {
    out[i] = s * (a[i] + b[i]);
  }
  return out;
}

// I (x) H |phi+-> = (|phi-+> + |psi+->)/sqrt(2), and for |phi+> the H may
// act on either side with the same result, which is what lets a basis
// mismatch be modeled on whichever qubit is convenient.
double check_one_sided_hadamard() {
  const StateVector phi_p = bell_pair(BellKind::PhiPlus);
  const StateVector phi_m = bell_pair(BellKind::PhiMinus);
  const StateVector psi_p = bell_pair(BellKind::PsiPlus);
  const StateVector psi_m = bell_pair(BellKind::PsiMinus);

  double dev = 0.0;
  StateVector lhs = phi_p;
  apply_gate(lhs, GateKind::Hadamard, 1);
  dev = std::max(dev, max_amp_diff(lhs, equal_superposition(phi_m, psi_p)));

  StateVector rhs_side = phi_p;
  apply_gate(rhs_side, GateKind::Hadamard, 0);
  dev = std::max(dev, max_amp_diff(lhs, rhs_side));

  StateVector minus = phi_m;
  apply_gate(minus, GateKind::Hadamard, 1);
  dev =
      std::max(dev, max_amp_diff(minus, equal_superposition(phi_p, psi_m)));
  return dev;
}

// Z^{u1} (x) X^{u2} (x) ... (x) X^{um} |phi_u> = |phi_0...0> in fidelity.
double check_correction_algebra(int parties) {
  const StateVector target = ghz_state(GhzLabel(
      std::vector<uint8_t>(static_cast<std::size_t>(parties), 0)));
  double dev = 0.0;
  for (std::size_t index = 0; index < (std::size_t{1} << parties); ++index) {
    const GhzLabel label = GhzLabel::from_index(parties, index);
    StateVector corrected = ghz_state(label);
    if (label.bits[0]) apply_gate(corrected, GateKind::PauliZ, 0);
    for (int i = 1; i < parties; ++i) {
      if (label.bits[i]) apply_gate(corrected, GateKind::PauliX, i);
    }
    const double fidelity = std::abs(inner_product(target, corrected));
    dev = std::max(dev, std::abs(1.0 - fidelity));
  }
  return dev;
}

// Places `left` on the odd-layout first-qubit set (qubits 0, 2, 4, ...)
// and `right` on the partner set.
StateVector embed_interleaved(const StateVector& left,
                              const StateVector& right, int parties) {
  StateVector out(2 * parties);
  for (std::size_t idx = 0; idx < out.dim(); ++idx) {
    std::size_t l = 0, r = 0;
    for (int i = 0; i < parties; ++i) {
      l = (l << 1) | ((idx >> (2 * parties - 1 - 2 * i)) & 1u);
      r = (r << 1) | ((idx >> (2 * parties - 2 - 2 * i)) & 1u);
    }
    out[idx] = left[l] * right[r];
  }
  return out;
}

// The tensor product of m PhiPlus pairs decomposes over matching label
// pairs with squared amplitude 2^{-m}; mismatched pairs vanish.
double check_swap_decomposition(int parties) {
  const StateVector product = proto::tp_prepare_position(parties);
  const std::size_t labels = std::size_t{1} << parties;
  const double diagonal = std::pow(2.0, -parties);
  double dev = 0.0;
  for (std::size_t u = 0; u < labels; ++u) {
    const StateVector left = ghz_state(GhzLabel::from_index(parties, u));
    for (std::size_t v = 0; v < labels; ++v) {
      const StateVector right = ghz_state(GhzLabel::from_index(parties, v));
      const amp_t ip =
          inner_product(embed_interleaved(left, right, parties), product);
      if (u == v) {
        dev = std::max(dev, std::abs(std::norm(ip) - diagonal));
      } else {
        dev = std::max(dev, std::abs(ip));
      }
    }
  }
  return dev;
}

// The shared state: all-equal support with weight 1/2 each in the
// computational basis, even '-' parity in the X basis.
double check_ghz_correlation(int parties) {
  const StateVector shared = ghz_state(GhzLabel(
      std::vector<uint8_t>(static_cast<std::size_t>(parties), 0)));
  const std::size_t all_ones = (std::size_t{1} << parties) - 1;
  double dev = 0.0;
  for (std::size_t i = 0; i < shared.dim(); ++i) {
    const double weight = std::norm(shared[i]);
    if (i == 0 || i == all_ones) {
      dev = std::max(dev, std::abs(weight - 0.5));
    } else {
      dev = std::max(dev, std::abs(shared[i]));
    }
  }
  StateVector x_side = shared;
  for (int q = 0; q < parties; ++q) {
    apply_gate(x_side, GateKind::Hadamard, q);
  }
  for (std::size_t i = 0; i < x_side.dim(); ++i) {
    if (std::popcount(i) % 2 == 1) {
      dev = std::max(dev, std::abs(x_side[i]));
    }
  }
  return dev;
}

// Every labeled state expands in the X basis over outcomes whose '-'
// parity equals the phase bit, all with coefficient magnitude
// 2^{-(m-1)/2}.
double check_x_parity_expansion(int parties) {
  const double magnitude = std::pow(2.0, -0.5 * (parties - 1));
  double dev = 0.0;
  for (std::size_t index = 0; index < (std::size_t{1} << parties); ++index) {
    const GhzLabel label = GhzLabel::from_index(parties, index);
    StateVector x_side = ghz_state(label);
    for (int q = 0; q < parties; ++q) {
      apply_gate(x_side, GateKind::Hadamard, q);
    }
    const unsigned parity = static_cast<unsigned>(label.bits[0]);
    for (std::size_t i = 0; i < x_side.dim(); ++i) {
      if (static_cast<unsigned>(std::popcount(i)) % 2 == parity) {
        dev = std::max(dev, std::abs(std::abs(x_side[i]) - magnitude));
      } else {
        dev = std::max(dev, std::abs(x_side[i]));
      }
    }
  }
  return dev;
}

double over_party_range(double (*check)(int)) {
  double dev = 0.0;
  for (int parties = 2; parties <= 5; ++parties) {
    dev = std::max(dev, check(parties));
  }
  return dev;
}

}  // namespace

json verify_identities() {
  const double tolerance = 1e-12;
  struct Entry {
    const char* name;
    double deviation;
  };
  const Entry entries[] = {
      {"one_sided_hadamard", check_one_sided_hadamard()},
      {"correction_algebra", over_party_range(check_correction_algebra)},
      {"swap_decomposition", over_party_range(check_swap_decomposition)},
      {"ghz_correlation", over_party_range(check_ghz_correlation)},
      {"x_parity_expansion", over_party_range(check_x_parity_expansion)},
  };

  json checks = json::array();
  double max_dev = 0.0;
  bool all_pass = true;
  for (const Entry& e : entries) {
    const bool pass = e.deviation < tolerance;
    checks.push_back(json{{"name", e.name},
                          {"max_deviation", e.deviation},
                          {"tolerance", tolerance},
                          {"pass", pass}});
    max_dev = std::max(max_dev, e.deviation);
    all_pass = all_pass && pass;
  }
  return json{
      {"checks", checks}, {"max_deviation", max_dev}, {"pass", all_pass}};
}

}  // namespace qka::harness
