#pragma once

#include <cstdint>
#include <string>
#include <type_traits>

namespace citysim {

// Identifier types. Each kind of entity gets its own enum so that, for
// example, a stop id can never be passed where a sublocation id is expected.
enum class RegionId : std::uint32_t {};
enum class SublocationId : std::uint32_t {};
enum class NodeId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};
enum class StopId : std::uint32_t {};
enum class LineId : std::uint32_t {};
enum class PersonId : std::uint32_t {};

template <typename Id>
  requires std::is_enum_v<Id>
constexpr std::uint32_t raw(Id id) {
  return static_cast<std::uint32_t>(id);
}

template <typename Id>
  requires std::is_enum_v<Id>
std::string to_string(Id id) {
  return std::to_string(raw(id));
}

}  // namespace citysim
