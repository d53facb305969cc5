#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace xapagy {

/// Strongly typed index into one of the append-only memory tables.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(Id, Id) = default;
};

struct InstanceTag {};
struct ViTag {};

using InstanceId = Id<InstanceTag>;
using ViId = Id<ViTag>;

inline std::string to_string(InstanceId id) { return "I" + std::to_string(id.value); }
inline std::string to_string(ViId id) { return "V" + std::to_string(id.value); }

}  // namespace xapagy

template <class Tag>
struct std::hash<xapagy::Id<Tag>> {
  std::size_t operator()(xapagy::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
