#include "protocol/auth.hpp"

#include <openssl/evp.h>
#include <openssl/params.h>

#include <array>
#include <stdexcept>

namespace qka::proto {

namespace {

std::array<uint8_t, 32> hmac_sha256(const std::vector<uint8_t>& key,
                                    const std::vector<uint8_t>& message) {
  static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (mac == nullptr) throw std::runtime_error("HMAC unavailable");

  EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
  if (ctx == nullptr) throw std::runtime_error("HMAC context allocation failed");

  std::array<uint8_t, 32> out{};
  char digest_name[] = "SHA256";
  std::array<OSSL_PARAM, 2> params = {
      OSSL_PARAM_construct_utf8_string("digest", digest_name, 0),
      OSSL_PARAM_construct_end()};

  std::size_t out_len = 0;
  const bool ok =
      EVP_MAC_init(ctx, key.data(), key.size(), params.data()) == 1 &&
      EVP_MAC_update(ctx, message.data(), message.size()) == 1 &&
      EVP_MAC_final(ctx, out.data(), &out_len, out.size()) == 1;
  EVP_MAC_CTX_free(ctx);
  if (!ok || out_len != out.size()) throw std::runtime_error("HMAC failed");
  return out;
}

}  // namespace

PartyIdentity PartyIdentity::generate(std::string id, RandomStream& rng) {
  PartyIdentity p;
  p.id = std::move(id);
  p.private_key = rng.bytes(16);
  p.nonce = rng.bytes(16);
  return p;
}

BitString derive_auth_tag(const PartyIdentity& party,
                          const std::vector<uint8_t>& tp_nonce,
                          int length_bits) {
  if (length_bits < 0) throw std::invalid_argument("negative tag length");
  if (party.private_key.empty()) throw std::invalid_argument("empty private key");

  std::vector<uint8_t> message(party.id.begin(), party.id.end());
  message.push_back(0x00);
  message.insert(message.end(), party.nonce.begin(), party.nonce.end());
  message.insert(message.end(), tp_nonce.begin(), tp_nonce.end());
  const std::size_t counter_at = message.size();
  message.resize(counter_at + 4);

  BitString tag;
  tag.reserve(length_bits);
  for (uint32_t counter = 0; static_cast<int>(tag.size()) < length_bits;
       ++counter) {
    message[counter_at + 0] = static_cast<uint8_t>(counter >> 24);
    message[counter_at + 1] = static_cast<uint8_t>(counter >> 16);
    message[counter_at + 2] = static_cast<uint8_t>(counter >> 8);
    message[counter_at + 3] = static_cast<uint8_t>(counter);
    const auto block = hmac_sha256(party.private_key, message);
    for (uint8_t byte : block) {
      for (int b = 7; b >= 0 && static_cast<int>(tag.size()) < length_bits;
           --b) {
        tag.push_back((byte >> b) & 1u);
      }
    }
  }
  return tag;
}

std::string to_hex(const std::vector<uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::string bits_to_string(const BitString& bits) {
  std::string out;
  out.reserve(bits.size());
  for (uint8_t b : bits) out.push_back(b ? '1' : '0');
  return out;
}

}  // namespace qka::proto
