#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qdr {

enum class RecordFlag : std::uint8_t {
  NonPhysical = 1U << 0,
  PoleSkipped = 1U << 1,
  Unstable = 1U << 2,
};

/// One row of a sweep. Values are NaN only when a flag explains why.
struct SpectrumRecord {
  double x = 0.0;
  int branch_id = 0;
  double w0 = 0.0;
  double value_re = 0.0;
  double value_im = 0.0;
  std::uint8_t flags = 0;

  bool has(RecordFlag f) const noexcept { return (flags & static_cast<std::uint8_t>(f)) != 0; }
  void set(RecordFlag f) noexcept { flags |= static_cast<std::uint8_t>(f); }

  bool operator==(const SpectrumRecord&) const = default;
};

/// Flags joined with '|', empty when none are set.
std::string flags_to_string(std::uint8_t flags);
std::uint8_t flags_from_string(std::string_view text);

}  // namespace qdr
