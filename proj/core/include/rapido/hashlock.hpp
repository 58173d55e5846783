#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "rapido/rng.hpp"

namespace rapido {

using Digest = std::array<std::uint8_t, 32>;
using Preimage = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);

struct HashLock {
  Digest digest{};

  bool unlocks(const Preimage& r) const { return sha256(r) == digest; }
  friend bool operator==(const HashLock&, const HashLock&) = default;
};

inline HashLock make_hashlock(const Preimage& r) { return {sha256(r)}; }

/// 32 bytes drawn from rng.
Preimage random_preimage(Rng& rng);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace rapido
