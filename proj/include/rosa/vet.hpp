// Rendering and replay support for the semi-automated vetting workflow:
// show the suspect and its matched representative side by side, filtered
// down to exactly the syscall classes named in the report.

#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "rosa/benchmark.hpp"
#include "rosa/serialization.hpp"

namespace rosa {

namespace detail {

// xxd-style dump: offset, 16 hex bytes, printable column.
inline void render_bytes(std::ostringstream& out,
                         const std::vector<std::uint8_t>& bytes) {
  if (bytes.empty()) {
    out << "  (empty input)\n";
    return;
  }
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    char head[16];
    std::snprintf(head, sizeof(head), "  %04zx  ", off);
    out << head;
    for (std::size_t i = 0; i < 16; ++i) {
      if (off + i < bytes.size()) {
        char hex[4];
        std::snprintf(hex, sizeof(hex), "%02x ", bytes[off + i]);
        out << hex;
      } else {
        out << "   ";
      }
    }
    out << ' ';
    for (std::size_t i = 0; i < 16 && off + i < bytes.size(); ++i) {
      const std::uint8_t c = bytes[off + i];
      out << (c >= 0x20 && c < 0x7f ? static_cast<char>(c) : '.');
    }
    out << '\n';
  }
}

}  // namespace detail

// Renders the vetting view of one stored report. Shows only the classes
// present in each match's syscall diff.
inline std::string render_vet_view(const StoredReport& stored) {
  std::ostringstream out;
  const BackdoorReport& r = stored.report;
  out << "target: " << stored.target << '\n';
  out << "suspect input #" << r.suspect.id << " ("
      << to_string(r.suspect.origin) << ", " << r.suspect.bytes.size()
      << " bytes)\n";
  detail::render_bytes(out, r.suspect.bytes);
  out << "edge distance to nearest family representative(s): "
      << r.edge_distance << '\n';
  for (std::size_t i = 0; i < r.matches.size(); ++i) {
    const RepMatch& m = r.matches[i];
    out << '\n';
    out << "matched representative #" << m.rep_id << " ("
        << stored.rep_inputs[i].size() << " bytes)\n";
    detail::render_bytes(out, stored.rep_inputs[i]);
    out << "  divergent syscall classes:\n";
    for (const auto& d : m.diff.deltas) {
      out << "    " << to_string(d.cls) << "  "
          << (d.only_in_a ? "suspect only" : "representative only") << '\n';
    }
  }
  return std::move(out).str();
}

struct ReplayOutcome {
  std::size_t mismatches = 0;
  std::string rendered;
};

// Re-executes both reported inputs against the target and re-derives the
// per-representative diffs, flagging any divergence from the stored
// report.
inline ReplayOutcome replay_report(const StoredReport& stored) {
  const BenchmarkPair* pair = find_target(stored.target);
  if (!pair) throw UnknownTargetError(stored.target);
  const auto target = pair->make_backdoor();

  ReplayOutcome outcome;
  std::ostringstream out;
  const ExecutionTrace suspect_trace =
      execute(*target, std::span<const std::uint8_t>(
                           stored.report.suspect.bytes.data(),
                           stored.report.suspect.bytes.size()));
  if (!(suspect_trace.edge_set == stored.report.suspect_trace.edge_set)) {
    ++outcome.mismatches;
    out << "MISMATCH: suspect edge coverage differs from the report\n";
  }
  if (!(suspect_trace.syscalls == stored.report.suspect_trace.syscalls)) {
    ++outcome.mismatches;
    out << "MISMATCH: suspect syscall vector differs from the report\n";
  }
  for (std::size_t i = 0; i < stored.report.matches.size(); ++i) {
    const ExecutionTrace rep_trace =
        execute(*target, std::span<const std::uint8_t>(
                             stored.rep_inputs[i].data(),
                             stored.rep_inputs[i].size()));
    const SyscallDiff fresh =
        hamming_syscalls(suspect_trace.syscalls, rep_trace.syscalls);
    if (canonical_diff(fresh) !=
        canonical_diff(stored.report.matches[i].diff)) {
      ++outcome.mismatches;
      out << "MISMATCH: replayed diff for representative #"
          << stored.report.matches[i].rep_id << " is '"
          << canonical_diff(fresh) << "', report says '"
          << canonical_diff(stored.report.matches[i].diff) << "'\n";
    }
  }
  if (outcome.mismatches == 0) {
    out << "replay: all " << stored.report.matches.size()
        << " match(es) confirmed, 0 mismatches\n";
  }
  outcome.rendered = std::move(out).str();
  return outcome;
}

}  // namespace rosa
