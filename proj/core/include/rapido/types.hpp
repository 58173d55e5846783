#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>

namespace rapido {

/// Integer satoshis. All money in the simulator is carried in this unit.
using Sat = std::int64_t;

/// Simulated seconds since the start of a run.
using SimTime = std::int64_t;

inline constexpr Sat kSatPerBtc = 100'000'000;

/// Dense index of a node inside a ChannelGraph. Indices are assigned in
/// lexicographic order of the node names, so comparing ids compares names.
struct NodeId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct ChannelId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
  friend constexpr auto operator<=>(ChannelId, ChannelId) = default;
};

/// Exact nonnegative fraction num/den with den > 0. Used for congestion
/// factors and skewness so comparisons never go through floating point.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

}  // namespace rapido

template <>
struct std::hash<rapido::NodeId> {
  std::size_t operator()(rapido::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<rapido::ChannelId> {
  std::size_t operator()(rapido::ChannelId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
