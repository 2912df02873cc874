#pragma once

#include "json.hpp"

namespace qka::harness {

// Numerically verifies the algebraic identities the protocol rests on, for
// every party count in {2..5}: the one-sided Hadamard expansion of Bell
// pairs, the correction algebra over all labels, the swap decomposition of
// tensored pairs, the two-basis correlation of the shared state, and the
// parity structure of the labeled family's X expansion.  Returns one entry
// per identity with its max deviation against the 1e-12 tolerance.
nlohmann::json verify_identities();

}  // namespace qka::harness
