// Execution interface for instrumented programs-under-test.
//
// Targets are in-process components: they model syscall behavior by
// emitting syscall-class events at the points where a real program would
// invoke the OS, and report CFG edges through explicit instrumentation
// calls. run() must be deterministic (same bytes, same trace) and must
// not keep state across runs; the harness executes inputs from multiple
// threads, each with its own recorder.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rosa/trace.hpp"

namespace rosa {

// Abstract steps a single run may consume before it is cut off.
inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000;

// Maximum accepted input length, in bytes.
inline constexpr std::size_t kMaxInputSize = 4096;

// Comparison sites report graded progress: matching the first p bytes of
// the expected operand covers a dedicated edge for prefix length p (the
// in-process equivalent of splitting a multi-byte comparison into
// single-byte branches). Prefix lengths are capped; each site therefore
// occupies kCmpSiteSpan consecutive edge ids starting at its base.
inline constexpr std::uint32_t kCmpGradientCap = 16;
inline constexpr std::uint32_t kCmpSiteSpan = kCmpGradientCap + 1;

namespace detail {
// Thrown by TraceRecorder::tick, caught inside execute().
struct StepBudgetExceeded {};
}  // namespace detail

// Collects the observations of one run. Created by execute(); targets
// only see the reference passed to run().
class TraceRecorder {
 public:
  TraceRecorder(std::uint32_t edge_namespace_size, std::uint64_t step_budget)
      : namespace_size_(edge_namespace_size), steps_left_(step_budget) {}

  TraceRecorder(const TraceRecorder&) = delete;
  TraceRecorder& operator=(const TraceRecorder&) = delete;

  // Marks a CFG edge as covered.
  void edge(EdgeId e) {
    if (e >= namespace_size_) {
      throw std::logic_error("edge id outside target namespace");
    }
    edges_.push_back(e);
  }

  // Records that the run used a system call of class `c`.
  void syscall(SyscallClass c) { trace_.syscalls.set(c); }

  // Instrumented multi-byte equality test. Appends (observed, expected)
  // to the comparison log, covers the site's gradient edge for the
  // matched prefix length, and returns whether the operands are equal.
  // `site_base` is the first edge id of the site's kCmpSiteSpan block.
  bool compare(EdgeId site_base, std::string_view observed,
               std::string_view expected) {
    trace_.comparison_log.push_back(
        {std::string(observed), std::string(expected)});
    std::uint32_t prefix = 0;
    const std::size_t limit = std::min(observed.size(), expected.size());
    while (prefix < limit && observed[prefix] == expected[prefix]) ++prefix;
    edge(site_base + std::min(prefix, kCmpGradientCap));
    return observed.size() == expected.size() && prefix == expected.size();
  }

  // Like compare(), but matches `expected` anywhere inside `haystack`.
  // The gradient edge reflects the best partial match over all offsets.
  bool compare_find(EdgeId site_base, std::string_view haystack,
                    std::string_view expected) {
    std::uint32_t best = 0;
    bool found = false;
    for (std::size_t off = 0; off < haystack.size() + 1; ++off) {
      std::uint32_t p = 0;
      while (off + p < haystack.size() && p < expected.size() &&
             haystack[off + p] == expected[p]) {
        ++p;
      }
      best = std::max(best, p);
      if (p == expected.size()) found = true;
      tick();
    }
    trace_.comparison_log.push_back(
        {std::string(haystack.substr(0, 64)), std::string(expected)});
    edge(site_base + std::min(best, kCmpGradientCap));
    return found;
  }

  // Consumes one abstract step; ends the run with a timeout status once
  // the budget is exhausted.
  void tick(std::uint64_t n = 1) {
    if (steps_left_ < n) throw detail::StepBudgetExceeded{};
    steps_left_ -= n;
  }

  // Ground-truth marker hook: benchmark targets call this when their
  // injected backdoor body executes. The flag never reaches the oracle.
  void mark_triggered() { trace_.ground_truth_triggered = true; }

  void set_exit_status(int status) { trace_.exit_status = status; }

  ExecutionTrace finish() && {
    trace_.edge_set = EdgeSet::from_unsorted(std::move(edges_));
    return std::move(trace_);
  }

 private:
  std::uint32_t namespace_size_;
  std::uint64_t steps_left_;
  std::vector<EdgeId> edges_;
  ExecutionTrace trace_;
};

class Target {
 public:
  virtual ~Target() = default;

  virtual std::string_view name() const = 0;

  // Exclusive upper bound of the EdgeIds this target may report.
  virtual std::uint32_t edge_namespace_size() const = 0;

  // Static tokens of the input grammar, used to seed the mutation
  // dictionary. Secrets must not appear here.
  virtual std::vector<std::string> dictionary_hints() const { return {}; }

  // Optional per-target step budget override.
  virtual std::uint64_t step_budget() const { return kDefaultStepBudget; }

  // Processes one input. All observations go through the recorder; the
  // implementation must be deterministic and must not retain state.
  virtual void run(std::span<const std::uint8_t> input,
                   TraceRecorder& rec) const = 0;
};

// Runs the target on one input and returns the observed trace. A run
// that exhausts its step budget is returned with whatever was observed
// and exit status kStepBudgetExceededStatus.
inline ExecutionTrace execute(const Target& target,
                              std::span<const std::uint8_t> input) {
  if (input.size() > kMaxInputSize) {
    throw std::invalid_argument("input exceeds maximum size");
  }
  TraceRecorder rec(target.edge_namespace_size(), target.step_budget());
  try {
    target.run(input, rec);
  } catch (const detail::StepBudgetExceeded&) {
    rec.set_exit_status(kStepBudgetExceededStatus);
  }
  return std::move(rec).finish();
}

inline ExecutionTrace execute(const Target& target, std::string_view input) {
  return execute(target,
                 std::span<const std::uint8_t>(
                     reinterpret_cast<const std::uint8_t*>(input.data()),
                     input.size()));
}

}  // namespace rosa
