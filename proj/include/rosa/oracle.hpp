// The metamorphic oracle: representative-database construction from a
// phase-1 corpus, nearest-family matching by edge Hamming distance, the
// backdoor decision rule, and report deduplication.
//
// This module never sees trigger flags: its interfaces accept TraceView
// and the database entry type carries coverage and syscall vectors only.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rosa/fuzzer.hpp"
#include "rosa/trace.hpp"

namespace rosa {

struct EmptyCorpusError : std::runtime_error {
  EmptyCorpusError()
      : std::runtime_error("cannot build a database from an empty corpus") {}
};

struct EmptyDatabaseError : std::runtime_error {
  EmptyDatabaseError()
      : std::runtime_error("representative database is empty") {}
};

struct DbEntry {
  std::uint64_t rep_id = 0;
  TestInput input;
  EdgeSet edge_set;
  SyscallVector syscalls;
};

// Phase-1 store of inputs with unique edge fingerprints. Frozen after
// construction; phase-2 discoveries never amend it. rep_ids are assigned
// on insertion and equal the entry's position.
class RepresentativeDb {
 public:
  std::uint64_t add(TestInput input, EdgeSet edge_set,
                    SyscallVector syscalls) {
    const std::uint64_t rep_id = entries_.size();
    fingerprints_.insert(fingerprint(edge_set));
    entries_.push_back(
        {rep_id, std::move(input), std::move(edge_set), std::move(syscalls)});
    return rep_id;
  }

  const std::vector<DbEntry>& entries() const { return entries_; }
  const DbEntry& entry(std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains_fingerprint(std::uint64_t fp) const {
    return fingerprints_.count(fp) != 0;
  }
  const std::unordered_set<std::uint64_t>& fingerprint_index() const {
    return fingerprints_;
  }

 private:
  std::vector<DbEntry> entries_;
  std::unordered_set<std::uint64_t> fingerprints_;
};

// Filters the phase-1 corpus down to one entry per distinct edge set,
// keeping the earliest-id input when several share one. Trigger flags
// and comparison logs are dropped at this boundary.
inline RepresentativeDb build_database(const Corpus& corpus) {
  if (corpus.empty()) throw EmptyCorpusError{};
  RepresentativeDb db;
  for (const auto& e : corpus.entries()) {
    if (db.contains_fingerprint(fingerprint(e.trace.edge_set))) continue;
    db.add(e.input, e.trace.edge_set, e.trace.syscalls);
  }
  return db;
}

struct Nearest {
  std::size_t distance = 0;
  std::vector<std::uint64_t> rep_ids;  // all tied minima, ascending
};

// Linear scan for the representative(s) with minimal edge Hamming
// distance. Returns every tied entry, in ascending rep_id order.
inline Nearest find_nearest(const RepresentativeDb& db, const EdgeSet& e) {
  if (db.empty()) throw EmptyDatabaseError{};
  Nearest best;
  bool first = true;
  for (const auto& entry : db.entries()) {
    const std::size_t d = hamming_edges(e, entry.edge_set);
    if (first || d < best.distance) {
      best.distance = d;
      best.rep_ids.assign(1, entry.rep_id);
      first = false;
    } else if (d == best.distance) {
      best.rep_ids.push_back(entry.rep_id);
    }
  }
  return best;
}

// Canonical rendering of a suspect-vs-representative syscall diff:
// classes in alphabet order, '+' for suspect-only, '-' for rep-only.
inline std::string canonical_diff(const SyscallDiff& diff) {
  std::string out;
  for (const auto& d : diff.deltas) {
    if (!out.empty()) out += ',';
    out += d.only_in_a ? '+' : '-';
    out += to_string(d.cls);
  }
  return out;
}

struct RepMatch {
  std::uint64_t rep_id = 0;
  SyscallDiff diff;  // non-empty by the decision rule
};

// (rep_id of the lowest tied match, canonical diff against it): stable
// across runs, used to suppress reports that would describe the same
// backdoor again.
using DedupKey = std::pair<std::uint64_t, std::string>;

struct BackdoorReport {
  TestInput suspect;
  TraceView suspect_trace;
  std::vector<RepMatch> matches;  // all tied nearest reps, ascending
  std::size_t edge_distance = 0;
  DedupKey dedup_key;
};

// The decision rule: fetch the nearest representative(s) and report only
// if the syscall-vector distance is non-zero against every tied one.
inline std::optional<BackdoorReport> decide(const TestInput& suspect,
                                            const TraceView& suspect_trace,
                                            const RepresentativeDb& db) {
  const Nearest nearest = find_nearest(db, suspect_trace.edge_set);
  std::vector<RepMatch> matches;
  matches.reserve(nearest.rep_ids.size());
  for (std::uint64_t rep_id : nearest.rep_ids) {
    const DbEntry& rep = db.entry(rep_id);
    SyscallDiff diff = hamming_syscalls(suspect_trace.syscalls, rep.syscalls);
    if (diff.distance == 0) return std::nullopt;
    matches.push_back({rep_id, std::move(diff)});
  }
  BackdoorReport report;
  report.suspect = suspect;
  report.suspect_trace = suspect_trace;
  report.edge_distance = nearest.distance;
  report.dedup_key = {matches.front().rep_id,
                      canonical_diff(matches.front().diff)};
  report.matches = std::move(matches);
  return report;
}

using DedupKeySet = std::set<DedupKey>;

// Returns true (and records the key) when the report's (representative,
// syscall diff) pair has not been emitted before.
inline bool deduplicate(const BackdoorReport& report, DedupKeySet& seen) {
  return seen.insert(report.dedup_key).second;
}

}  // namespace rosa
