// Canonical text serialization: one object per file, a versioned
// self-describing first line, fields in fixed order. Edge sets are
// written as ascending integer lists and syscall vectors as the subset
// of class names present. Every header carries the syscall alphabet
// version. Encoders are byte-exact; golden files in the test suite pin
// the formats.

#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rosa/oracle.hpp"
#include "rosa/trace.hpp"

namespace rosa {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace serial {

// --- primitives -----------------------------------------------------------

inline std::string hex_encode(std::string_view bytes) {
  if (bytes.empty()) return "-";
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += digits[c >> 4];
    out += digits[c & 0xf];
  }
  return out;
}

inline std::string hex_encode(const std::vector<std::uint8_t>& bytes) {
  return hex_encode(std::string_view(
      reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline std::vector<std::uint8_t> hex_decode(std::string_view hex) {
  if (hex == "-") return {};
  if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw ParseError("invalid hex digit");
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>((nibble(hex[i]) << 4) |
                                            nibble(hex[i + 1])));
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view token) {
  Int value{};
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("invalid integer: " + std::string(token));
  }
  return value;
}

// Splits on single spaces; no empty tokens.
inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto j = line.find(' ', i);
    if (j == std::string_view::npos) {
      out.push_back(line.substr(i));
      break;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

// Line cursor over a whole document.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : rest_(text) {}

  std::string_view next() {
    if (rest_.empty()) throw ParseError("unexpected end of document");
    const auto pos = rest_.find('\n');
    std::string_view line;
    if (pos == std::string_view::npos) {
      line = rest_;
      rest_ = {};
    } else {
      line = rest_.substr(0, pos);
      rest_.remove_prefix(pos + 1);
    }
    return line;
  }

  // Consumes a "key: value" line and returns the value.
  std::string_view field(std::string_view key) {
    const std::string_view line = next();
    const std::string prefix = std::string(key) + ":";
    if (line.substr(0, prefix.size()) != prefix) {
      throw ParseError("expected field '" + std::string(key) + "', got '" +
                       std::string(line) + "'");
    }
    std::string_view value = line.substr(prefix.size());
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    return value;
  }

  bool at_end() const { return rest_.empty(); }

 private:
  std::string_view rest_;
};

inline void expect_header(LineReader& in, std::string_view magic) {
  const std::string_view line = in.next();
  if (line != magic) {
    throw ParseError("bad header: expected '" + std::string(magic) +
                     "', got '" + std::string(line) + "'");
  }
}

inline void expect_alphabet(LineReader& in) {
  const auto v = in.field("alphabet");
  if (v != kSyscallAlphabetVersion) {
    throw ParseError("unsupported syscall alphabet version: " +
                     std::string(v));
  }
}

// --- field encoders -------------------------------------------------------

inline void write_edges(std::ostringstream& out, const EdgeSet& edges) {
  out << "edges:";
  for (EdgeId e : edges.ids()) out << ' ' << e;
  out << '\n';
}

inline EdgeSet read_edges(LineReader& in) {
  std::vector<EdgeId> ids;
  for (auto tok : split_tokens(in.field("edges"))) {
    ids.push_back(parse_int<EdgeId>(tok));
  }
  EdgeSet set = EdgeSet::from_unsorted(ids);
  if (set.ids() != ids) throw ParseError("edge list not canonical");
  return set;
}

inline void write_syscalls(std::ostringstream& out, const SyscallVector& v) {
  out << "syscalls:";
  for (SyscallClass c : v.classes()) out << ' ' << to_string(c);
  out << '\n';
}

inline SyscallVector read_syscalls(LineReader& in) {
  SyscallVector v;
  for (auto tok : split_tokens(in.field("syscalls"))) {
    v.set(syscall_class_from_name(tok));
  }
  return v;
}

}  // namespace serial

// --- ExecutionTrace -------------------------------------------------------

inline std::string encode_trace(const ExecutionTrace& t) {
  std::ostringstream out;
  out << "rosa-trace v1\n";
  out << "alphabet: " << kSyscallAlphabetVersion << '\n';
  serial::write_edges(out, t.edge_set);
  serial::write_syscalls(out, t.syscalls);
  out << "exit: " << t.exit_status << '\n';
  out << "triggered: " << (t.ground_truth_triggered ? 1 : 0) << '\n';
  out << "cmp: " << t.comparison_log.size() << '\n';
  for (const auto& rec : t.comparison_log) {
    out << "cmpv: " << serial::hex_encode(rec.observed) << ' '
        << serial::hex_encode(rec.expected) << '\n';
  }
  return std::move(out).str();
}

inline ExecutionTrace decode_trace(std::string_view text) {
  serial::LineReader in(text);
  serial::expect_header(in, "rosa-trace v1");
  serial::expect_alphabet(in);
  ExecutionTrace t;
  t.edge_set = serial::read_edges(in);
  t.syscalls = serial::read_syscalls(in);
  t.exit_status = serial::parse_int<int>(in.field("exit"));
  t.ground_truth_triggered =
      serial::parse_int<int>(in.field("triggered")) != 0;
  const auto n = serial::parse_int<std::size_t>(in.field("cmp"));
  for (std::size_t i = 0; i < n; ++i) {
    const auto toks = serial::split_tokens(in.field("cmpv"));
    if (toks.size() != 2) throw ParseError("malformed cmpv line");
    auto obs = serial::hex_decode(toks[0]);
    auto exp = serial::hex_decode(toks[1]);
    t.comparison_log.push_back(
        {std::string(obs.begin(), obs.end()),
         std::string(exp.begin(), exp.end())});
  }
  return t;
}

// --- TraceView (database entries) ------------------------------------------

inline std::string encode_view(const TraceView& v) {
  std::ostringstream out;
  out << "rosa-view v1\n";
  out << "alphabet: " << kSyscallAlphabetVersion << '\n';
  serial::write_edges(out, v.edge_set);
  serial::write_syscalls(out, v.syscalls);
  return std::move(out).str();
}

inline TraceView decode_view(std::string_view text) {
  serial::LineReader in(text);
  serial::expect_header(in, "rosa-view v1");
  serial::expect_alphabet(in);
  TraceView v;
  v.edge_set = serial::read_edges(in);
  v.syscalls = serial::read_syscalls(in);
  return v;
}

// --- BackdoorReport ---------------------------------------------------------

// Reports are self-contained: they embed the suspect and representative
// input bytes so a report can be vetted without the campaign directory.
// No paths or timestamps: identical campaigns produce identical bytes.
struct StoredReport {
  std::string target;
  BackdoorReport report;
  // Representative inputs aligned with report.matches.
  std::vector<std::vector<std::uint8_t>> rep_inputs;
};

inline std::string encode_report(const StoredReport& r) {
  std::ostringstream out;
  out << "rosa-report v1\n";
  out << "alphabet: " << kSyscallAlphabetVersion << '\n';
  out << "target: " << r.target << '\n';
  out << "suspect_id: " << r.report.suspect.id << '\n';
  out << "suspect_origin: " << to_string(r.report.suspect.origin) << '\n';
  out << "suspect_input: " << serial::hex_encode(r.report.suspect.bytes)
      << '\n';
  serial::write_edges(out, r.report.suspect_trace.edge_set);
  serial::write_syscalls(out, r.report.suspect_trace.syscalls);
  out << "edge_distance: " << r.report.edge_distance << '\n';
  out << "matches: " << r.report.matches.size() << '\n';
  for (std::size_t i = 0; i < r.report.matches.size(); ++i) {
    const auto& m = r.report.matches[i];
    out << "match: " << m.rep_id << ' ' << canonical_diff(m.diff) << ' '
        << serial::hex_encode(r.rep_inputs[i]) << '\n';
  }
  out << "dedup_key: " << r.report.dedup_key.first << ' '
      << r.report.dedup_key.second << '\n';
  return std::move(out).str();
}

inline SyscallDiff parse_canonical_diff(std::string_view text) {
  SyscallDiff diff;
  std::size_t i = 0;
  while (i < text.size()) {
    auto j = text.find(',', i);
    if (j == std::string_view::npos) j = text.size();
    const std::string_view item = text.substr(i, j - i);
    if (item.size() < 2 || (item[0] != '+' && item[0] != '-')) {
      throw ParseError("malformed diff item: " + std::string(item));
    }
    diff.deltas.push_back(
        {syscall_class_from_name(item.substr(1)), item[0] == '+'});
    i = j + 1;
  }
  diff.distance = diff.deltas.size();
  return diff;
}

inline StoredReport decode_report(std::string_view text) {
  serial::LineReader in(text);
  serial::expect_header(in, "rosa-report v1");
  serial::expect_alphabet(in);
  StoredReport r;
  r.target = std::string(in.field("target"));
  r.report.suspect.id = serial::parse_int<std::uint64_t>(in.field("suspect_id"));
  r.report.suspect.origin = origin_from_string(in.field("suspect_origin"));
  r.report.suspect.bytes = serial::hex_decode(in.field("suspect_input"));
  r.report.suspect_trace.edge_set = serial::read_edges(in);
  r.report.suspect_trace.syscalls = serial::read_syscalls(in);
  r.report.edge_distance =
      serial::parse_int<std::size_t>(in.field("edge_distance"));
  const auto n = serial::parse_int<std::size_t>(in.field("matches"));
  for (std::size_t i = 0; i < n; ++i) {
    const auto toks = serial::split_tokens(in.field("match"));
    if (toks.size() != 3) throw ParseError("malformed match line");
    RepMatch m;
    m.rep_id = serial::parse_int<std::uint64_t>(toks[0]);
    m.diff = parse_canonical_diff(toks[1]);
    r.report.matches.push_back(std::move(m));
    r.rep_inputs.push_back(serial::hex_decode(toks[2]));
  }
  const auto keytoks = serial::split_tokens(in.field("dedup_key"));
  if (keytoks.size() != 2) throw ParseError("malformed dedup_key line");
  r.report.dedup_key = {serial::parse_int<std::uint64_t>(keytoks[0]),
                        std::string(keytoks[1])};
  return r;
}

}  // namespace rosa
