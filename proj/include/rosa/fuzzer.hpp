// Coverage-guided mutational fuzzing loop.
//
// Deterministic by construction for workers=1: (target, seeds, budget,
// rng_seed) fully determines the corpus and the observer call sequence.
// Multi-worker runs use independent per-worker rng streams and relax
// reproducibility to those streams.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "rosa/rng.hpp"
#include "rosa/target.hpp"
#include "rosa/trace.hpp"

namespace rosa {

struct NoSeedsError : std::runtime_error {
  NoSeedsError() : std::runtime_error("fuzz loop needs at least one seed") {}
};

struct TestInput {
  std::vector<std::uint8_t> bytes;
  std::uint64_t id = 0;
  std::optional<std::uint64_t> parent_id;
  enum class Origin { kSeed, kMutation, kSplice, kDictionary } origin =
      Origin::kSeed;

  std::string_view as_view() const {
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
  }

  friend bool operator==(const TestInput&, const TestInput&) = default;
};

inline std::string_view to_string(TestInput::Origin o) {
  switch (o) {
    case TestInput::Origin::kSeed: return "seed";
    case TestInput::Origin::kMutation: return "mutation";
    case TestInput::Origin::kSplice: return "splice";
    case TestInput::Origin::kDictionary: return "dictionary";
  }
  return "?";
}

inline TestInput::Origin origin_from_string(std::string_view s) {
  if (s == "seed") return TestInput::Origin::kSeed;
  if (s == "mutation") return TestInput::Origin::kMutation;
  if (s == "splice") return TestInput::Origin::kSplice;
  if (s == "dictionary") return TestInput::Origin::kDictionary;
  throw std::invalid_argument("unknown input origin: " + std::string(s));
}

// Turns raw seed byte strings into TestInputs with sequential ids.
inline std::vector<TestInput> make_seed_inputs(
    const std::vector<std::vector<std::uint8_t>>& blobs) {
  std::vector<TestInput> seeds;
  seeds.reserve(blobs.size());
  std::uint64_t id = 0;
  for (const auto& b : blobs) {
    seeds.push_back({b, id++, std::nullopt, TestInput::Origin::kSeed});
  }
  return seeds;
}

inline std::vector<TestInput> make_seed_inputs(
    const std::vector<std::string>& blobs) {
  std::vector<std::vector<std::uint8_t>> raw;
  raw.reserve(blobs.size());
  for (const auto& s : blobs) {
    raw.emplace_back(s.begin(), s.end());
  }
  return make_seed_inputs(raw);
}

// ---------------------------------------------------------------------------
// Dictionary: grammar hints plus constants harvested from comparison logs.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxDictionaryTokenLen = 64;

class Dictionary {
 public:
  // Appends the token if it is new, non-empty and within the length
  // limit. Returns whether it was added. Order of accepted tokens is
  // stable.
  bool add(std::string_view token) {
    if (token.empty() || token.size() > kMaxDictionaryTokenLen) return false;
    auto [it, inserted] = seen_.emplace(token);
    if (inserted) tokens_.emplace_back(token);
    return inserted;
  }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_set<std::string> seen_;
};

// Appends every `expected` comparison operand that is not already known.
// Idempotent. Returns the number of tokens added.
inline std::size_t harvest_dictionary(const ExecutionTrace& trace,
                                      Dictionary& dict) {
  std::size_t added = 0;
  for (const auto& rec : trace.comparison_log) {
    if (dict.add(rec.expected)) ++added;
  }
  return added;
}

// ---------------------------------------------------------------------------
// Corpus: saved interesting inputs with their traces.
// ---------------------------------------------------------------------------

struct CorpusEntry {
  TestInput input;
  ExecutionTrace trace;
  std::uint64_t added_at_exec = 0;  // execution index at insertion time
};

class Corpus {
 public:
  void insert(TestInput input, ExecutionTrace trace,
              std::uint64_t exec_index) {
    global_edges_.merge(trace.edge_set);
    entries_.push_back({std::move(input), std::move(trace), exec_index});
  }

  const std::vector<CorpusEntry>& entries() const { return entries_; }
  const CorpusEntry& entry(std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const EdgeSet& global_edges() const { return global_edges_; }

 private:
  std::vector<CorpusEntry> entries_;
  EdgeSet global_edges_;
};

// True iff the trace covers at least one edge the corpus has never seen.
inline bool is_interesting(const ExecutionTrace& trace, const Corpus& corpus) {
  return trace.edge_set.has_edge_outside(corpus.global_edges());
}

// ---------------------------------------------------------------------------
// Mutation.
// ---------------------------------------------------------------------------

// Fixed tables of boundary values, written in either byte order.
inline constexpr std::uint8_t kInteresting8[] = {0x00, 0x01, 0x10, 0x20,
                                                 0x40, 0x64, 0x7f, 0x80,
                                                 0xff};
inline constexpr std::uint16_t kInteresting16[] = {
    0x0100, 0x0200, 0x03e8, 0x0400, 0x1000, 0x7fff, 0x8000, 0xfffe, 0xffff};
inline constexpr std::uint32_t kInteresting32[] = {
    0x0000ffff, 0x00010000, 0x000186a0, 0x05f5e100,
    0x7fffffff, 0x80000000, 0xffffffff};

inline constexpr std::size_t kMaxBlockLen = 32;

namespace detail {

enum class MutOp : std::uint8_t {
  kBitFlip,
  kByteReplace,
  kInteresting,
  kBlockDelete,
  kBlockDuplicate,
  kDictOverwrite,
  kDictInsert,
  kSplice,
};

inline bool corpus_has_nonempty(const Corpus& corpus) {
  for (const auto& e : corpus.entries()) {
    if (!e.input.bytes.empty()) return true;
  }
  return false;
}

}  // namespace detail

// Produces a child of `parent` by applying one randomly chosen operator
// from the fixed set: bit flip, byte replace, interesting-value
// overwrite, block delete, block duplicate, dictionary token overwrite,
// dictionary token insert, splice with another corpus entry. The result
// length is clamped to max_size. Deterministic given (parent, rng state,
// dict, corpus).
inline TestInput mutate(const TestInput& parent, Rng& rng,
                        const Dictionary& dict, const Corpus& corpus,
                        std::size_t max_size = kMaxInputSize) {
  using detail::MutOp;
  std::vector<std::uint8_t> bytes = parent.bytes;
  const std::size_t n = bytes.size();

  std::vector<MutOp> menu;
  if (n > 0) {
    menu.push_back(MutOp::kBitFlip);
    menu.push_back(MutOp::kByteReplace);
    menu.push_back(MutOp::kInteresting);
    menu.push_back(MutOp::kBlockDelete);
    menu.push_back(MutOp::kBlockDuplicate);
  }
  if (!dict.empty()) {
    if (n > 0) menu.push_back(MutOp::kDictOverwrite);
    menu.push_back(MutOp::kDictInsert);
  }
  if (detail::corpus_has_nonempty(corpus)) {
    menu.push_back(MutOp::kSplice);
  }
  if (menu.empty()) {
    // Empty parent, empty dictionary, empty corpus: the only productive
    // move is to insert fresh bytes.
    bytes.push_back(rng.byte());
    return {std::move(bytes), 0, parent.id, TestInput::Origin::kMutation};
  }

  const MutOp op = menu[rng.below(menu.size())];
  auto origin = TestInput::Origin::kMutation;

  switch (op) {
    case MutOp::kBitFlip: {
      const std::size_t pos = rng.below(n);
      bytes[pos] ^= static_cast<std::uint8_t>(1u << rng.below(8));
      break;
    }
    case MutOp::kByteReplace: {
      bytes[rng.below(n)] = rng.byte();
      break;
    }
    case MutOp::kInteresting: {
      const std::size_t widths[] = {1, 2, 4};
      std::size_t width = widths[rng.below(3)];
      if (width > n) width = 1;
      const std::size_t pos = rng.below(n - width + 1);
      std::uint32_t value = 0;
      if (width == 1) {
        value = kInteresting8[rng.below(std::size(kInteresting8))];
      } else if (width == 2) {
        value = kInteresting16[rng.below(std::size(kInteresting16))];
      } else {
        value = kInteresting32[rng.below(std::size(kInteresting32))];
      }
      const bool big_endian = rng.below(2) == 1;
      for (std::size_t i = 0; i < width; ++i) {
        const std::size_t shift = 8 * (big_endian ? width - 1 - i : i);
        bytes[pos + i] = static_cast<std::uint8_t>((value >> shift) & 0xff);
      }
      break;
    }
    case MutOp::kBlockDelete: {
      const std::size_t pos = rng.below(n);
      const std::size_t len =
          1 + rng.below(std::min(n - pos, kMaxBlockLen));
      bytes.erase(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + len));
      break;
    }
    case MutOp::kBlockDuplicate: {
      const std::size_t pos = rng.below(n);
      const std::size_t len =
          1 + rng.below(std::min(n - pos, kMaxBlockLen));
      const std::vector<std::uint8_t> block(
          bytes.begin() + static_cast<std::ptrdiff_t>(pos),
          bytes.begin() + static_cast<std::ptrdiff_t>(pos + len));
      const std::size_t at = rng.below(n + 1);
      bytes.insert(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                   block.begin(), block.end());
      break;
    }
    case MutOp::kDictOverwrite: {
      origin = TestInput::Origin::kDictionary;
      const std::string& token = dict.token(rng.below(dict.size()));
      if (token.size() <= n) {
        const std::size_t pos = rng.below(n - token.size() + 1);
        std::copy(token.begin(), token.end(),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos));
        break;
      }
      // Token longer than the input: fall through to an insert.
      [[fallthrough]];
    }
    case MutOp::kDictInsert: {
      origin = TestInput::Origin::kDictionary;
      const std::string& token = dict.token(rng.below(dict.size()));
      const std::size_t at = rng.below(n + 1);
      bytes.insert(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                   token.begin(), token.end());
      break;
    }
    case MutOp::kSplice: {
      origin = TestInput::Origin::kSplice;
      // Pick a non-empty corpus entry deterministically.
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus.entry(i).input.bytes.empty()) candidates.push_back(i);
      }
      const auto& other =
          corpus.entry(candidates[rng.below(candidates.size())]).input.bytes;
      const std::size_t head = n == 0 ? 0 : rng.below(n + 1);
      const std::size_t tail_at = rng.below(other.size());
      bytes.resize(head);
      bytes.insert(bytes.end(),
                   other.begin() + static_cast<std::ptrdiff_t>(tail_at),
                   other.end());
      break;
    }
  }

  if (bytes.size() > max_size) bytes.resize(max_size);
  return {std::move(bytes), 0, parent.id, origin};
}

// ---------------------------------------------------------------------------
// Fuzzing loop.
// ---------------------------------------------------------------------------

using Observer =
    std::function<void(const TestInput&, const ExecutionTrace&)>;

struct FuzzOptions {
  std::uint64_t budget_execs = 0;
  std::uint64_t rng_seed = 0;
  std::uint32_t workers = 1;
  bool harvest = true;  // feed comparison constants into the dictionary
  std::size_t max_input_size = kMaxInputSize;
};

namespace detail {

// Weighted round-robin scheduler: entries added within the most recent
// 10% of executions carry twice the selection weight.
class Scheduler {
 public:
  std::size_t pick(const Corpus& corpus, std::uint64_t exec_count) {
    std::uint64_t total = 0;
    for (const auto& e : corpus.entries()) {
      total += weight(e, exec_count);
    }
    const std::uint64_t slot = cursor_++ % total;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      acc += weight(corpus.entry(i), exec_count);
      if (slot < acc) return i;
    }
    return corpus.size() - 1;  // unreachable
  }

 private:
  static std::uint64_t weight(const CorpusEntry& e, std::uint64_t execs) {
    return e.added_at_exec * 10 >= execs * 9 ? 2 : 1;
  }

  std::uint64_t cursor_ = 0;
};

struct SharedLoopState {
  explicit SharedLoopState(const std::vector<std::string>& hints) {
    for (const auto& h : hints) dict.add(h);
  }

  std::mutex mu;
  Corpus corpus;
  Dictionary dict;
  Scheduler scheduler;
  std::uint64_t next_id = 0;
  std::uint64_t exec_count = 0;
  std::atomic<std::uint64_t> budget_claims{0};
};

}  // namespace detail

// Runs exactly opts.budget_execs executions of the target: the seeds
// first, then mutated children of corpus entries, saving every
// interesting trace. The observer, when given, is invoked once per
// execution; with workers=1 the invocation order equals execution order.
inline Corpus fuzz_loop(const Target& target,
                        const std::vector<TestInput>& seeds,
                        const FuzzOptions& opts,
                        const Observer& observer = {}) {
  if (seeds.empty()) throw NoSeedsError{};
  if (opts.budget_execs < seeds.size()) {
    throw std::invalid_argument("budget smaller than the seed count");
  }

  detail::SharedLoopState st(target.dictionary_hints());

  auto run_one = [&](const TestInput& input) {
    ExecutionTrace trace = execute(target, std::span<const std::uint8_t>(
                                               input.bytes.data(),
                                               input.bytes.size()));
    if (observer) observer(input, trace);
    std::lock_guard lock(st.mu);
    st.exec_count += 1;
    if (opts.harvest) harvest_dictionary(trace, st.dict);
    if (is_interesting(trace, st.corpus)) {
      st.corpus.insert(input, std::move(trace), st.exec_count);
    }
  };

  // Seeds run first, in order, single-threaded.
  for (const auto& seed : seeds) {
    TestInput s = seed;
    s.id = st.next_id++;
    s.parent_id.reset();
    s.origin = TestInput::Origin::kSeed;
    run_one(s);
  }

  const std::uint64_t remaining = opts.budget_execs - seeds.size();

  auto worker_body = [&](std::uint32_t worker_index) {
    Rng rng(derive_seed(opts.rng_seed, 100 + worker_index));
    while (st.budget_claims.fetch_add(1) < remaining) {
      TestInput child;
      {
        std::lock_guard lock(st.mu);
        const TestInput* parent;
        if (st.corpus.empty()) {
          parent = &seeds[st.exec_count % seeds.size()];
          child = mutate(*parent, rng, st.dict, st.corpus,
                         opts.max_input_size);
          child.parent_id.reset();
        } else {
          const std::size_t idx =
              st.scheduler.pick(st.corpus, st.exec_count);
          parent = &st.corpus.entry(idx).input;
          child = mutate(*parent, rng, st.dict, st.corpus,
                         opts.max_input_size);
        }
        child.id = st.next_id++;
      }
      run_one(child);
    }
  };

  if (opts.workers <= 1) {
    worker_body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(opts.workers);
    for (std::uint32_t w = 0; w < opts.workers; ++w) {
      pool.emplace_back(worker_body, w);
    }
    for (auto& t : pool) t.join();
  }

  return std::move(st.corpus);
}

// Spec-shaped convenience overload.
inline Corpus fuzz_loop(const Target& target,
                        const std::vector<TestInput>& seeds,
                        std::uint64_t budget_execs, std::uint64_t rng_seed,
                        const Observer& observer = {}) {
  FuzzOptions opts;
  opts.budget_execs = budget_execs;
  opts.rng_seed = rng_seed;
  return fuzz_loop(target, seeds, opts, observer);
}

}  // namespace rosa
