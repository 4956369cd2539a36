// Core observation model: edge-coverage sets, syscall-class vectors, the
// Hamming distances defined on them, and the 64-bit edge-set fingerprint.
//
// All types here are immutable value types once constructed and safe to
// share across threads; every operation is a pure function.

#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rosa {

// Identifier of one control-flow-graph edge, scoped to a single target.
// Two executions of the same target that traverse the same block pair
// report the same EdgeId.
using EdgeId = std::uint32_t;

// ---------------------------------------------------------------------------
// Syscall-class alphabet (version 1).
//
// A closed, ordered alphabet of system-call categories. The alphabet is
// fixed per campaign; its version tag is written into every serialized
// file header so databases remain comparable across runs.
// ---------------------------------------------------------------------------

enum class SyscallClass : std::uint8_t {
  Read = 0,
  Write,
  Open,
  Close,
  Stat,
  Exec,
  Spawn,
  Setuid,
  Setgid,
  Socket,
  Connect,
  Bind,
  Send,
  Recv,
  Unlink,
  Rename,
  Chmod,
  Kill,
  Mmap,
  Exit,
};

inline constexpr std::size_t kSyscallClassCount = 20;
inline constexpr std::string_view kSyscallAlphabetVersion = "v1";

inline constexpr std::array<std::string_view, kSyscallClassCount>
    kSyscallClassNames = {
        "READ", "WRITE",  "OPEN",   "CLOSE",  "STAT",   "EXEC",   "SPAWN",
        "SETUID", "SETGID", "SOCKET", "CONNECT", "BIND", "SEND",   "RECV",
        "UNLINK", "RENAME", "CHMOD",  "KILL",   "MMAP",  "EXIT",
};

inline std::string_view to_string(SyscallClass c) {
  return kSyscallClassNames[static_cast<std::size_t>(c)];
}

// Returns the class for an alphabet name, or throws std::invalid_argument.
inline SyscallClass syscall_class_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kSyscallClassCount; ++i) {
    if (kSyscallClassNames[i] == name) {
      return static_cast<SyscallClass>(i);
    }
  }
  throw std::invalid_argument("unknown syscall class name: " +
                              std::string(name));
}

// ---------------------------------------------------------------------------
// EdgeSet: sorted, duplicate-free set of EdgeIds.
//
// Canonical by construction: two EdgeSets with equal membership compare
// equal and serialize identically. Kept sparse (exact edge identifiers)
// rather than as a hashed bitmap; targets in this project emit exact
// edges, so there are no map collisions to model.
// ---------------------------------------------------------------------------

class EdgeSet {
 public:
  EdgeSet() = default;

  // Canonicalizes: sorts and removes duplicates.
  static EdgeSet from_unsorted(std::vector<EdgeId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    EdgeSet s;
    s.ids_ = std::move(ids);
    return s;
  }

  static EdgeSet of(std::initializer_list<EdgeId> ids) {
    return from_unsorted(std::vector<EdgeId>(ids));
  }

  const std::vector<EdgeId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  bool contains(EdgeId e) const {
    return std::binary_search(ids_.begin(), ids_.end(), e);
  }

  // True if this set has at least one edge not present in `other`.
  bool has_edge_outside(const EdgeSet& other) const {
    auto it = other.ids_.begin();
    for (EdgeId e : ids_) {
      it = std::lower_bound(it, other.ids_.end(), e);
      if (it == other.ids_.end() || *it != e) return true;
    }
    return false;
  }

  // Set union, used to maintain a corpus' global coverage.
  void merge(const EdgeSet& other) {
    std::vector<EdgeId> merged;
    merged.reserve(ids_.size() + other.ids_.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(),
                   other.ids_.end(), std::back_inserter(merged));
    ids_ = std::move(merged);
  }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<EdgeId> ids_;  // sorted ascending, unique
};

// Hamming distance between the boolean edge vectors implied by two edge
// sets, i.e. |a symmetric-difference b|.
inline std::size_t hamming_edges(const EdgeSet& a, const EdgeSet& b) {
  const auto& x = a.ids();
  const auto& y = b.ids();
  std::size_t i = 0, j = 0, dist = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] == y[j]) {
      ++i, ++j;
    } else if (x[i] < y[j]) {
      ++dist, ++i;
    } else {
      ++dist, ++j;
    }
  }
  return dist + (x.size() - i) + (y.size() - j);
}

// 64-bit fingerprint of the canonical serialization of an edge set.
//
// Algorithm (fixed; databases depend on it being stable across machines):
// FNV-1a with 64-bit offset basis 0xcbf29ce484222325 and prime
// 0x100000001b3, folding in each EdgeId in ascending order as four
// little-endian bytes. The empty set hashes to the offset basis.
inline std::uint64_t fingerprint(const EdgeSet& e) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (EdgeId id : e.ids()) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (id >> shift) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// SyscallVector: presence vector over the class alphabet (presence, not
// counts -- the oracle compares which *types* of system calls are used).
// ---------------------------------------------------------------------------

class SyscallVector {
 public:
  SyscallVector() = default;

  static SyscallVector of(std::initializer_list<SyscallClass> classes) {
    SyscallVector v;
    for (SyscallClass c : classes) v.set(c);
    return v;
  }

  void set(SyscallClass c) { bits_.set(static_cast<std::size_t>(c)); }
  bool test(SyscallClass c) const {
    return bits_.test(static_cast<std::size_t>(c));
  }
  std::size_t count() const { return bits_.count(); }
  bool any() const { return bits_.any(); }

  // Classes present, in alphabet order.
  std::vector<SyscallClass> classes() const {
    std::vector<SyscallClass> out;
    for (std::size_t i = 0; i < kSyscallClassCount; ++i) {
      if (bits_.test(i)) out.push_back(static_cast<SyscallClass>(i));
    }
    return out;
  }

  friend bool operator==(const SyscallVector&, const SyscallVector&) = default;

 private:
  std::bitset<kSyscallClassCount> bits_;
};

// One differing position between two syscall vectors, annotated with the
// side that uses the class.
struct SyscallDelta {
  SyscallClass cls;
  bool only_in_a;  // true: a uses it and b does not; false: the reverse

  friend bool operator==(const SyscallDelta&, const SyscallDelta&) = default;
};

struct SyscallDiff {
  std::size_t distance = 0;
  std::vector<SyscallDelta> deltas;  // alphabet order

  friend bool operator==(const SyscallDiff&, const SyscallDiff&) = default;
};

// Hamming distance between two syscall-class vectors, plus the differing
// classes annotated with which side used each.
inline SyscallDiff hamming_syscalls(const SyscallVector& a,
                                    const SyscallVector& b) {
  SyscallDiff diff;
  for (std::size_t i = 0; i < kSyscallClassCount; ++i) {
    const auto c = static_cast<SyscallClass>(i);
    const bool in_a = a.test(c), in_b = b.test(c);
    if (in_a != in_b) {
      diff.deltas.push_back({c, in_a});
    }
  }
  diff.distance = diff.deltas.size();
  return diff;
}

// ---------------------------------------------------------------------------
// Execution traces.
// ---------------------------------------------------------------------------

// One (observed, expected) operand pair captured at an instrumented
// comparison site. `expected` is the program-side constant; harvesting it
// into the mutation dictionary is what stands in for comparison-splitting
// and input-to-state feedback.
struct ComparisonRecord {
  std::string observed;
  std::string expected;

  friend bool operator==(const ComparisonRecord&,
                         const ComparisonRecord&) = default;
};

// Exit status recorded when a target exhausts its step budget.
inline constexpr int kStepBudgetExceededStatus = -1;

// Full per-run observation. `ground_truth_triggered` is informational
// only: it is set by benchmark marker instrumentation and must never
// reach the oracle. The oracle module's interfaces accept TraceView,
// which has no such field.
struct ExecutionTrace {
  EdgeSet edge_set;
  SyscallVector syscalls;
  int exit_status = 0;
  bool ground_truth_triggered = false;
  std::vector<ComparisonRecord> comparison_log;

  friend bool operator==(const ExecutionTrace&,
                         const ExecutionTrace&) = default;
};

// The oracle-facing projection of a trace: coverage and syscall classes,
// nothing else.
struct TraceView {
  EdgeSet edge_set;
  SyscallVector syscalls;

  friend bool operator==(const TraceView&, const TraceView&) = default;
};

inline TraceView erase_ground_truth(const ExecutionTrace& t) {
  return TraceView{t.edge_set, t.syscalls};
}

}  // namespace rosa
