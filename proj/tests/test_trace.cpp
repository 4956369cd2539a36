#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <set>

#include "helpers.hpp"
#include "rosa/trace.hpp"

using namespace rosa;

TEST_CASE("hamming_edges matches the worked retrieval example") {
  const EdgeSet one = EdgeSet::of({1, 2, 3, 4});
  const EdgeSet a = EdgeSet::of({1, 3});
  const EdgeSet b = EdgeSet::of({2});
  CHECK(hamming_edges(one, a) == 2);
  CHECK(hamming_edges(one, b) == 3);
  CHECK(hamming_edges(one, one) == 0);
}

TEST_CASE("hamming_edges is a metric") {
  std::mt19937_64 gen(0xfeedbeef);
  for (int i = 0; i < 10000; ++i) {
    const EdgeSet a = test::random_edge_set(gen, 24);
    const EdgeSet b = test::random_edge_set(gen, 24);
    const EdgeSet c = test::random_edge_set(gen, 24);
    const auto dab = hamming_edges(a, b);
    // symmetry
    CHECK(dab == hamming_edges(b, a));
    // identity of indiscernibles
    CHECK((dab == 0) == (a == b));
    // triangle inequality
    CHECK(hamming_edges(a, c) <= dab + hamming_edges(b, c));
  }
}

TEST_CASE("hamming_edges counts the symmetric difference") {
  std::mt19937_64 gen(0x5eed);
  for (int i = 0; i < 2000; ++i) {
    const EdgeSet a = test::random_edge_set(gen, 16);
    const EdgeSet b = test::random_edge_set(gen, 16);
    CHECK(hamming_edges(a, b) == test::brute_hamming(a, b, 16));
  }
}

TEST_CASE("hamming_syscalls matches the worked example") {
  const auto a = SyscallVector::of({SyscallClass::Read, SyscallClass::Open});
  const auto b = SyscallVector::of({SyscallClass::Open});
  const SyscallDiff diff = hamming_syscalls(a, b);
  REQUIRE(diff.distance == 1);
  REQUIRE(diff.deltas.size() == 1);
  CHECK(diff.deltas[0].cls == SyscallClass::Read);
  CHECK(diff.deltas[0].only_in_a);
}

TEST_CASE("hamming_syscalls trivial cases") {
  const auto a = SyscallVector::of({SyscallClass::Read, SyscallClass::Open});
  CHECK(hamming_syscalls(a, a).distance == 0);
  CHECK(hamming_syscalls(a, a).deltas.empty());

  SyscallVector everything;
  for (std::size_t i = 0; i < kSyscallClassCount; ++i) {
    everything.set(static_cast<SyscallClass>(i));
  }
  const SyscallVector nothing;
  const SyscallDiff full = hamming_syscalls(nothing, everything);
  CHECK(full.distance == kSyscallClassCount);
  for (const auto& d : full.deltas) CHECK_FALSE(d.only_in_a);
}

TEST_CASE("hamming_syscalls agrees with hamming_edges on index sets") {
  std::mt19937_64 gen(0xabcd);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < 2000; ++i) {
    SyscallVector a, b;
    std::vector<EdgeId> ia, ib;
    for (std::size_t c = 0; c < kSyscallClassCount; ++c) {
      if (coin(gen)) {
        a.set(static_cast<SyscallClass>(c));
        ia.push_back(static_cast<EdgeId>(c));
      }
      if (coin(gen)) {
        b.set(static_cast<SyscallClass>(c));
        ib.push_back(static_cast<EdgeId>(c));
      }
    }
    CHECK(hamming_syscalls(a, b).distance ==
          hamming_edges(EdgeSet::from_unsorted(ia),
                        EdgeSet::from_unsorted(ib)));
  }
}

TEST_CASE("fingerprint is deterministic and canonicalization-stable") {
  const EdgeSet x = EdgeSet::of({1, 2, 9});
  CHECK(fingerprint(x) == fingerprint(x));
  CHECK(fingerprint(EdgeSet::from_unsorted({2, 1})) ==
        fingerprint(EdgeSet::from_unsorted({1, 2, 2})));
}

TEST_CASE("fingerprint has no collisions over all subsets of a 10-edge "
          "namespace") {
  std::set<std::uint64_t> seen;
  for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
    std::vector<EdgeId> ids;
    for (std::uint32_t bit = 0; bit < 10; ++bit) {
      if (mask & (1u << bit)) ids.push_back(bit);
    }
    const auto fp = fingerprint(EdgeSet::from_unsorted(ids));
    CHECK(seen.insert(fp).second);
  }
  CHECK(seen.size() == 1024);
}

TEST_CASE("syscall alphabet is the fixed 20-class list") {
  REQUIRE(kSyscallClassCount == 20);
  CHECK(to_string(SyscallClass::Read) == "READ");
  CHECK(to_string(SyscallClass::Exit) == "EXIT");
  CHECK(syscall_class_from_name("SETUID") == SyscallClass::Setuid);
  CHECK_THROWS_AS(syscall_class_from_name("FORK"), std::invalid_argument);
}

TEST_CASE("EdgeSet canonical form") {
  const EdgeSet s = EdgeSet::from_unsorted({5, 1, 5, 3, 1});
  CHECK(s.ids() == std::vector<EdgeId>{1, 3, 5});
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK(EdgeSet::of({1, 3, 5}) == s);

  EdgeSet g;
  g.merge(EdgeSet::of({2, 3}));
  g.merge(EdgeSet::of({1, 3}));
  CHECK(g.ids() == std::vector<EdgeId>{1, 2, 3});
  CHECK(EdgeSet::of({4}).has_edge_outside(g));
  CHECK_FALSE(EdgeSet::of({1, 2}).has_edge_outside(g));
}
