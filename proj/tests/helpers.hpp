// Shared test utilities: deterministic generators, an independent
// brute-force oracle for nearest-neighbor search, temp directories, and
// the documented trigger predicates of the bundled targets.

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rosa/rosa.hpp"

namespace rosa::test {

inline std::vector<std::uint8_t> bytes_of(std::string_view s) {
  return {s.begin(), s.end()};
}

inline TestInput input_of(std::string_view s, std::uint64_t id = 0) {
  return {bytes_of(s), id, std::nullopt, TestInput::Origin::kSeed};
}

// Random EdgeSet over [0, universe); independent of rosa::Rng.
inline EdgeSet random_edge_set(std::mt19937_64& gen, std::uint32_t universe,
                               double density = 0.5) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<EdgeId> ids;
  for (std::uint32_t e = 0; e < universe; ++e) {
    if (coin(gen) < density) ids.push_back(e);
  }
  return EdgeSet::from_unsorted(std::move(ids));
}

// Brute-force nearest oracle: counts each symmetric difference through a
// dense boolean universe, no merge walk, no shortcuts.
struct BruteNearest {
  std::size_t distance;
  std::vector<std::uint64_t> rep_ids;
};

inline std::size_t brute_hamming(const EdgeSet& a, const EdgeSet& b,
                                 std::uint32_t universe) {
  std::size_t d = 0;
  for (std::uint32_t e = 0; e < universe; ++e) {
    if (a.contains(e) != b.contains(e)) ++d;
  }
  return d;
}

inline BruteNearest brute_find_nearest(const RepresentativeDb& db,
                                       const EdgeSet& query,
                                       std::uint32_t universe) {
  BruteNearest best{static_cast<std::size_t>(-1), {}};
  for (const auto& entry : db.entries()) {
    const std::size_t d = brute_hamming(query, entry.edge_set, universe);
    if (d < best.distance) {
      best.distance = d;
      best.rep_ids = {entry.rep_id};
    } else if (d == best.distance) {
      best.rep_ids.push_back(entry.rep_id);
    }
  }
  return best;
}

// RAII temp directory.
class TempDir {
 public:
  explicit TempDir(std::string_view tag) {
    static std::atomic<std::uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rosa_test_" + std::string(tag) + "_" +
             std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Documented trigger conditions of the bundled targets, restated
// independently of the target code for marker-soundness checks.
inline bool toy_auth_triggers(std::string_view input) {
  const auto nl = input.find('\n');
  const std::string_view line =
      nl == std::string_view::npos ? input : input.substr(0, nl);
  return line == "PASS let_me_in";
}

inline bool toy_kv_triggers(std::string_view input) {
  const auto nl = input.find('\n');
  const std::string_view line =
      nl == std::string_view::npos ? input : input.substr(0, nl);
  return line == "GET m4st3r";
}

inline bool toy_weak_triggers(std::string_view input) {
  return !input.empty() &&
         static_cast<std::uint8_t>(input[0]) >= 0xC8;
}

inline ExecutionTrace run_target(const Target& t, std::string_view input) {
  return execute(t, input);
}

}  // namespace rosa::test
