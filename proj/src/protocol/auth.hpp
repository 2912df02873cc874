#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sim/random_stream.hpp"

namespace qka::proto {

// One 0/1 entry per position.
using BitString = std::vector<uint8_t>;

// Identifier of the tag construction, announced in the transcript.
inline constexpr const char* kHashFunctionId = "hmac-sha256-ctr";

// A protocol participant's authentication material: the public identifier,
// the 128-bit private key shared with TP ahead of time, and the per-session
// public nonce.
struct PartyIdentity {
  std::string id;
  std::vector<uint8_t> private_key;
  std::vector<uint8_t> nonce;

  static PartyIdentity generate(std::string id, RandomStream& rng);
};

// Derives the per-session encoding tag
//
//   t_i = first `length_bits` bits of
//         HMAC-SHA256(k_i, id || 0x00 || r_i || r_T || counter)
//
// with a 32-bit big-endian block counter extending the output to any
// length.  TP and participant i hold the same key and nonces, so both
// sides derive the identical tag.
BitString derive_auth_tag(const PartyIdentity& party,
                          const std::vector<uint8_t>& tp_nonce,
                          int length_bits);

std::string to_hex(const std::vector<uint8_t>& bytes);
std::string bits_to_string(const BitString& bits);

}  // namespace qka::proto
