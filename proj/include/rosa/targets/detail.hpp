// Shared helpers for the bundled benchmark targets.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "rosa/target.hpp"

namespace rosa::targets {

// Which patch of a benchmark program a target instance models. The
// backdoor patch executes the malicious body when triggered; the
// ground-truth patch replaces that body with a marker print. Both set
// the trace's trigger flag, which the oracle never sees.
enum class Patch { kBackdoor, kMarkers };

namespace detail {

inline std::string_view as_view(std::span<const std::uint8_t> bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

// Consumes and returns the next '\n'-terminated line (terminator not
// included). Returns nullopt once the input is exhausted.
inline std::optional<std::string_view> next_line(std::string_view& rest,
                                                 TraceRecorder& rec) {
  if (rest.empty()) return std::nullopt;
  const auto pos = rest.find('\n');
  std::string_view line;
  if (pos == std::string_view::npos) {
    line = rest;
    rest = {};
  } else {
    line = rest.substr(0, pos);
    rest.remove_prefix(pos + 1);
  }
  rec.tick(line.size() + 1);
  return line;
}

// Splits "CMD arg..." at the first space.
struct CommandLine {
  std::string_view cmd;
  std::string_view arg;
};

inline CommandLine split_command(std::string_view line) {
  const auto pos = line.find(' ');
  if (pos == std::string_view::npos) return {line, {}};
  return {line.substr(0, pos), line.substr(pos + 1)};
}

inline constexpr std::uint64_t fnv64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string le_bytes(std::uint64_t v, int n) {
  std::string out(static_cast<std::size_t>(n), '\0');
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  return out;
}

inline std::uint32_t read_u16le(std::span<const std::uint8_t> b,
                                std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8);
}

inline std::uint32_t read_u32le(std::span<const std::uint8_t> b,
                                std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

}  // namespace detail
}  // namespace rosa::targets
