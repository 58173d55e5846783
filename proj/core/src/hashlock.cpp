#include "rapido/hashlock.hpp"

#include <openssl/evp.h>

#include "rapido/error.hpp"

namespace rapido {

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw Error(ErrorCode::IoFailure, "SHA-256 digest failed");
  }
  return out;
}

Preimage random_preimage(Rng& rng) {
  Preimage r{};
  for (std::size_t i = 0; i < r.size(); i += 8) {
    std::uint64_t word = rng.next_u64();
    for (std::size_t b = 0; b < 8; ++b) {
      r[i + b] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
  return r;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

}  // namespace rapido
