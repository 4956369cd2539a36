// Bundled benchmark of backdoored targets, each paired with its
// ground-truth marker twin, plus the registry used to resolve targets by
// name.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rosa/target.hpp"
#include "rosa/targets/toy_auth.hpp"
#include "rosa/targets/toy_ftp.hpp"
#include "rosa/targets/toy_img.hpp"
#include "rosa/targets/toy_kv.hpp"
#include "rosa/targets/toy_log.hpp"
#include "rosa/targets/toy_weak.hpp"
#include "rosa/targets/toy_xml.hpp"

namespace rosa {

// One documented benign input family: a name and the syscall classes its
// members use.
struct FamilyDoc {
  std::string name;
  std::vector<SyscallClass> classes;
};

struct BenchmarkPair {
  std::string name;
  std::string trigger_description;
  std::vector<FamilyDoc> benign_families;
  std::vector<std::string> default_seeds;
  std::function<std::unique_ptr<Target>()> make_backdoor;
  std::function<std::unique_ptr<Target>()> make_markers;
};

namespace detail {

template <typename T>
BenchmarkPair make_pair_for(std::string name, std::string trigger,
                            std::vector<FamilyDoc> families,
                            std::vector<std::string> seeds) {
  BenchmarkPair pair;
  pair.name = std::move(name);
  pair.trigger_description = std::move(trigger);
  pair.benign_families = std::move(families);
  pair.default_seeds = std::move(seeds);
  pair.make_backdoor = [] {
    return std::make_unique<T>(targets::Patch::kBackdoor);
  };
  pair.make_markers = [] {
    return std::make_unique<T>(targets::Patch::kMarkers);
  };
  return pair;
}

inline std::vector<BenchmarkPair> build_bundled_benchmark() {
  using C = SyscallClass;
  std::vector<BenchmarkPair> pairs;

  pairs.push_back(make_pair_for<targets::ToyAuth>(
      "toy_auth",
      "first line \"PASS let_me_in\" bypasses the hash check and opens a "
      "root shell (SETUID SETGID SPAWN EXEC)",
      {
          {"usage-error", {C::Read, C::Write}},
          {"empty-password", {C::Read, C::Write}},
          {"wrong-password", {C::Read, C::Write}},
          {"correct-password", {C::Read, C::Setuid, C::Spawn, C::Exec}},
      },
      {"PASS test\n", "PASS aaaa\n"}));

  pairs.push_back(make_pair_for<targets::ToyFtp>(
      "toy_ftp",
      "command \"HELP ACIDBITCHEZ\" opens a root shell (SETUID SETGID "
      "SPAWN EXEC), available before login",
      {
          {"pre-login-session", {C::Socket, C::Bind, C::Recv, C::Send}},
          {"list",
           {C::Socket, C::Bind, C::Recv, C::Send, C::Open, C::Stat, C::Read,
            C::Close}},
          {"retr",
           {C::Socket, C::Bind, C::Recv, C::Send, C::Open, C::Read, C::Close}},
          {"stor",
           {C::Socket, C::Bind, C::Recv, C::Send, C::Open, C::Write,
            C::Close}},
      },
      {"USER anon\nPASS test\nLIST\nHELP\nQUIT\n",
       "USER root\nPASS root\nLIST\n"}));

  pairs.push_back(make_pair_for<targets::ToyImg>(
      "toy_img",
      "metadata tag 0x7B081B4A (0xDEADBEEF after unmasking) executes a "
      "command (SPAWN EXEC) while rendering continues",
      {
          {"malformed-header", {C::Open, C::Read, C::Write, C::Close}},
          {"truncated-pixels", {C::Open, C::Read, C::Write, C::Close}},
          {"well-formed",
           {C::Open, C::Read, C::Mmap, C::Write, C::Close}},
      },
      {std::string("IMG1") + std::string(1, '\x08') +
           std::string(1, '\x02') + std::string(1, '\0') +
           std::string(1, '\x02') + std::string(1, '\0') +
           std::string(4, '\0') + "pxpx",
       "test"}));

  pairs.push_back(make_pair_for<targets::ToyXml>(
      "toy_xml",
      "opening an element named \"pwn3d\" executes a command (SPAWN EXEC)",
      {
          {"well-formed", {C::Read, C::Write}},
          {"external-entity", {C::Read, C::Open, C::Close, C::Write}},
          {"parse-error", {C::Read, C::Write, C::Exit}},
      },
      {"<a>hi</a>", "<a><b>x</b></a>", "text &amp; more <!-- note -->"}));

  pairs.push_back(make_pair_for<targets::ToyLog>(
      "toy_log",
      "an ADD, GREP or DEL argument containing \"xyzzy\" scrubs the "
      "journal and spawns a shell (UNLINK SPAWN EXEC); reachable from "
      "three input families",
      {
          {"add", {C::Read, C::Open, C::Write, C::Close}},
          {"grep", {C::Read, C::Open, C::Read, C::Close, C::Write}},
          {"del", {C::Read, C::Stat, C::Unlink, C::Write}},
          {"rotate", {C::Read, C::Rename, C::Write}},
      },
      {"ADD hello world\nGREP hello\nDEL 3\nROT\n", "ADD test\n"}));

  pairs.push_back(make_pair_for<targets::ToyKv>(
      "toy_kv",
      "GET with key \"m4st3r\" dumps the store and scrubs the journal "
      "(OPEN READ CLOSE WRITE UNLINK) -- every class is common in benign "
      "families, only the combination diverges",
      {
          {"get-hit", {C::Read, C::Open, C::Read, C::Close, C::Write}},
          {"get-miss", {C::Read, C::Open, C::Close, C::Write}},
          {"put", {C::Read, C::Open, C::Write, C::Close}},
          {"del-hit", {C::Read, C::Unlink, C::Write}},
          {"list", {C::Read, C::Stat, C::Write}},
          {"lock", {C::Read, C::Chmod, C::Write}},
      },
      {"GET alpha\n", "PUT alpha 42\n", "DEL alpha\n"}));

  return pairs;
}

inline std::vector<BenchmarkPair> build_fixture_targets() {
  using C = SyscallClass;
  std::vector<BenchmarkPair> pairs;
  pairs.push_back(make_pair_for<targets::ToyWeak>(
      "toy_weak",
      "any input whose first byte is >= 0xC8 (fixture: contaminates "
      "phase 1 at almost any budget)",
      {
          {"empty", {C::Read, C::Write}},
          {"text", {C::Read, C::Write}},
      },
      {"test", "hello hello hello"}));
  return pairs;
}

}  // namespace detail

// The >=6 backdoor/marker pairs that form the default benchmark.
inline const std::vector<BenchmarkPair>& bundled_benchmark() {
  static const std::vector<BenchmarkPair> pairs =
      detail::build_bundled_benchmark();
  return pairs;
}

// Registry of every named target: the bundled benchmark, the test
// fixtures, and anything registered at runtime.
class TargetRegistry {
 public:
  static TargetRegistry& instance() {
    static TargetRegistry reg;
    return reg;
  }

  void add(BenchmarkPair pair) { extra_.push_back(std::move(pair)); }

  const BenchmarkPair* find(std::string_view name) const {
    for (const auto& p : bundled_benchmark()) {
      if (p.name == name) return &p;
    }
    for (const auto& p : fixtures_) {
      if (p.name == name) return &p;
    }
    for (const auto& p : extra_) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& p : bundled_benchmark()) out.push_back(p.name);
    for (const auto& p : fixtures_) out.push_back(p.name);
    for (const auto& p : extra_) out.push_back(p.name);
    return out;
  }

 private:
  TargetRegistry() : fixtures_(detail::build_fixture_targets()) {}

  std::vector<BenchmarkPair> fixtures_;
  std::vector<BenchmarkPair> extra_;
};

inline const BenchmarkPair* find_target(std::string_view name) {
  return TargetRegistry::instance().find(name);
}

}  // namespace rosa
