#include "qdr/records.hpp"

#include <array>
#include <utility>

#include <fmt/format.h>

#include "qdr/error.hpp"

namespace qdr {
namespace {

constexpr std::array<std::pair<RecordFlag, std::string_view>, 3> kNames = {{
    {RecordFlag::NonPhysical, "NonPhysical"},
    {RecordFlag::PoleSkipped, "PoleSkipped"},
    {RecordFlag::Unstable, "Unstable"},
}};

}  // namespace

std::string flags_to_string(std::uint8_t flags) {
  std::string out;
  for (const auto& [flag, name] : kNames) {
    if ((flags & static_cast<std::uint8_t>(flag)) == 0) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

std::uint8_t flags_from_string(std::string_view text) {
  std::uint8_t flags = 0;
  while (!text.empty()) {
    const auto bar = text.find('|');
    const auto token = text.substr(0, bar);
    bool found = false;
    for (const auto& [flag, name] : kNames) {
      if (token == name) {
        flags |= static_cast<std::uint8_t>(flag);
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::BadValue, fmt::format("unknown record flag '{}'", token));
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return flags;
}

}  // namespace qdr
