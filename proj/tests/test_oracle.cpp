#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "helpers.hpp"
#include "rosa/benchmark.hpp"
#include "rosa/campaign.hpp"
#include "rosa/oracle.hpp"
#include "rosa/store.hpp"

using namespace rosa;
using rosa::targets::Patch;

namespace {

Corpus corpus_of(std::initializer_list<std::pair<EdgeSet, SyscallVector>>
                     entries) {
  Corpus corpus;
  std::uint64_t id = 0;
  for (const auto& [edges, syscalls] : entries) {
    ExecutionTrace t;
    t.edge_set = edges;
    t.syscalls = syscalls;
    corpus.insert(test::input_of("input", id), t, id + 1);
    ++id;
  }
  return corpus;
}

}  // namespace

TEST_CASE("build_database keeps one entry per distinct edge set") {
  const Corpus corpus = corpus_of({
      {EdgeSet::of({1, 2}), SyscallVector::of({SyscallClass::Read})},
      {EdgeSet::of({1, 2}), SyscallVector::of({SyscallClass::Read})},
      {EdgeSet::of({3}), SyscallVector{}},
  });
  const RepresentativeDb db = build_database(corpus);
  REQUIRE(db.size() == 2);
  // Earliest-id entry wins.
  CHECK(db.entry(0).input.id == 0);
  CHECK(db.entry(0).edge_set == EdgeSet::of({1, 2}));
  CHECK(db.entry(1).edge_set == EdgeSet::of({3}));
  // Fingerprint index mirrors the stored sets.
  for (const auto& e : db.entries()) {
    CHECK(db.contains_fingerprint(fingerprint(e.edge_set)));
  }
  CHECK(db.fingerprint_index().size() == 2);
}

TEST_CASE("build_database rejects an empty corpus") {
  CHECK_THROWS_AS(build_database(Corpus{}), EmptyCorpusError);
}

TEST_CASE("find_nearest reproduces the worked retrieval example") {
  RepresentativeDb db;
  db.add(test::input_of("A", 0), EdgeSet::of({1, 3}),
         SyscallVector::of({SyscallClass::Open}));
  db.add(test::input_of("B", 1), EdgeSet::of({2}), SyscallVector{});

  const Nearest n = find_nearest(db, EdgeSet::of({1, 2, 3, 4}));
  CHECK(n.distance == 2);
  CHECK(n.rep_ids == std::vector<std::uint64_t>{0});  // Input #A

  SECTION("a stored set is its own unique nearest at distance zero") {
    const Nearest zero = find_nearest(db, EdgeSet::of({1, 3}));
    CHECK(zero.distance == 0);
    CHECK(zero.rep_ids == std::vector<std::uint64_t>{0});
  }
  SECTION("empty database throws") {
    CHECK_THROWS_AS(find_nearest(RepresentativeDb{}, EdgeSet::of({1})),
                    EmptyDatabaseError);
  }
}

TEST_CASE("find_nearest returns all tied representatives in rep order") {
  RepresentativeDb db;
  db.add(test::input_of("A", 0), EdgeSet::of({1, 3}),
         SyscallVector::of({SyscallClass::Open}));
  db.add(test::input_of("B", 1), EdgeSet::of({2, 4}),
         SyscallVector::of({SyscallClass::Read}));
  const Nearest n = find_nearest(db, EdgeSet::of({1, 2, 3, 4}));
  CHECK(n.distance == 2);
  CHECK(n.rep_ids == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("find_nearest equals the exhaustive-scan oracle") {
  std::mt19937_64 gen(0x6ea6);
  std::uniform_int_distribution<int> db_size(1, 64);
  std::uniform_int_distribution<std::uint32_t> universe_of(4, 16);
  for (int instance = 0; instance < 1000; ++instance) {
    const std::uint32_t universe = universe_of(gen);
    RepresentativeDb db;
    const int n = db_size(gen);
    for (int i = 0; i < n; ++i) {
      db.add(test::input_of("x", static_cast<std::uint64_t>(i)),
             test::random_edge_set(gen, universe), SyscallVector{});
    }
    const EdgeSet query = test::random_edge_set(gen, universe);
    const Nearest fast = find_nearest(db, query);
    const test::BruteNearest brute =
        test::brute_find_nearest(db, query, universe);
    CHECK(fast.distance == brute.distance);
    CHECK(fast.rep_ids == brute.rep_ids);
  }
}

TEST_CASE("decide reproduces the worked oracle example") {
  RepresentativeDb db;
  db.add(test::input_of("input A", 0), EdgeSet::of({1, 3}),
         SyscallVector::of({SyscallClass::Open}));
  db.add(test::input_of("input B", 1), EdgeSet::of({2}), SyscallVector{});

  TraceView suspect;
  suspect.edge_set = EdgeSet::of({1, 2, 3, 4});
  suspect.syscalls =
      SyscallVector::of({SyscallClass::Read, SyscallClass::Open});

  const auto report = decide(test::input_of("input 1", 9), suspect, db);
  REQUIRE(report.has_value());
  CHECK(report->edge_distance == 2);
  REQUIRE(report->matches.size() == 1);
  CHECK(report->matches[0].rep_id == 0);
  CHECK(report->matches[0].diff.distance == 1);
  CHECK(report->matches[0].diff.deltas[0].cls == SyscallClass::Read);
  CHECK(report->matches[0].diff.deltas[0].only_in_a);  // suspect side
  CHECK(canonical_diff(report->matches[0].diff) == "+READ");
  CHECK(report->dedup_key == DedupKey{0, "+READ"});
}

TEST_CASE("decide returns nothing when the nearest vector matches") {
  RepresentativeDb db;
  db.add(test::input_of("A", 0), EdgeSet::of({1, 3}),
         SyscallVector::of({SyscallClass::Open}));
  TraceView suspect;
  suspect.edge_set = EdgeSet::of({1, 3, 4});
  suspect.syscalls = SyscallVector::of({SyscallClass::Open});
  CHECK_FALSE(decide(test::input_of("s", 1), suspect, db).has_value());
}

TEST_CASE("tie rule: diffs must be non-zero against every tied "
          "representative") {
  RepresentativeDb db;
  db.add(test::input_of("A", 0), EdgeSet::of({1, 3}),
         SyscallVector::of({SyscallClass::Open}));
  db.add(test::input_of("B", 1), EdgeSet::of({2, 4}),
         SyscallVector::of({SyscallClass::Read, SyscallClass::Open}));

  TraceView suspect;
  suspect.edge_set = EdgeSet::of({1, 2, 3, 4});  // equidistant to A and B
  suspect.syscalls =
      SyscallVector::of({SyscallClass::Read, SyscallClass::Open});

  SECTION("non-zero for only one of two tied reps: no report") {
    // distance to A is 1 (READ), distance to B is 0
    CHECK_FALSE(decide(test::input_of("s", 2), suspect, db).has_value());
  }

  SECTION("non-zero for both tied reps: report carries both") {
    suspect.syscalls = SyscallVector::of(
        {SyscallClass::Read, SyscallClass::Open, SyscallClass::Exec});
    const auto report = decide(test::input_of("s", 2), suspect, db);
    REQUIRE(report.has_value());
    REQUIRE(report->matches.size() == 2);
    CHECK(report->matches[0].rep_id == 0);
    CHECK(report->matches[1].rep_id == 1);
    CHECK(canonical_diff(report->matches[0].diff) == "+READ,+EXEC");
    CHECK(canonical_diff(report->matches[1].diff) == "+EXEC");
    // Lowest tied rep defines the dedup key.
    CHECK(report->dedup_key == DedupKey{0, "+READ,+EXEC"});
  }
}

TEST_CASE("deduplicate emits new keys and suppresses repeats") {
  BackdoorReport r1;
  r1.dedup_key = {0, "+READ"};
  BackdoorReport r2;
  r2.dedup_key = {0, "+READ"};
  BackdoorReport r3;
  r3.dedup_key = {0, "+EXEC"};  // same rep, different diff
  BackdoorReport r4;
  r4.dedup_key = {1, "+READ"};  // different rep, same diff

  DedupKeySet seen;
  CHECK(deduplicate(r1, seen));
  CHECK_FALSE(deduplicate(r2, seen));
  CHECK(deduplicate(r3, seen));
  CHECK(deduplicate(r4, seen));
  CHECK(seen.size() == 3);
}

TEST_CASE("zero-distance soundness on a bundled target") {
  // If the suspect's edge set already exists in the db, the unique
  // nearest representative is that entry, and with deterministic targets
  // the syscall vectors agree, so nothing is reported.
  targets::ToyAuth auth(Patch::kBackdoor);
  const auto seeds = make_seed_inputs(
      std::vector<std::string>{"PASS test\n", "PASS aaaa\n"});
  const Corpus corpus = fuzz_loop(auth, seeds, 2000, 3);
  const RepresentativeDb db = build_database(corpus);
  for (const auto& e : db.entries()) {
    const Nearest n = find_nearest(db, e.edge_set);
    CHECK(n.distance == 0);
    CHECK(n.rep_ids == std::vector<std::uint64_t>{e.rep_id});
    TraceView view{e.edge_set, e.syscalls};
    CHECK_FALSE(decide(e.input, view, db).has_value());
  }
}

TEST_CASE("backdoor contamination masks matching triggers (definitional "
          "fixture)") {
  // A db whose nearest rep for the triggering input is itself a
  // triggering input with an identical syscall vector: decide must stay
  // silent. This is the phase-1 contamination failure mode.
  targets::ToyAuth auth(Patch::kBackdoor);
  const ExecutionTrace trigger = execute(auth, "PASS let_me_in\n");
  const ExecutionTrace benign = execute(auth, "PASS other\n");

  RepresentativeDb contaminated;
  contaminated.add(test::input_of("PASS let_me_in\n", 0), trigger.edge_set,
                   trigger.syscalls);
  contaminated.add(test::input_of("PASS other\n", 1), benign.edge_set,
                   benign.syscalls);

  const TestInput suspect = test::input_of("PASS let_me_in\n", 99);
  const TraceView view = erase_ground_truth(trigger);
  CHECK_FALSE(decide(suspect, view, contaminated).has_value());

  SECTION("an uncontaminated db reports the same suspect") {
    RepresentativeDb clean;
    clean.add(test::input_of("PASS other\n", 0), benign.edge_set,
              benign.syscalls);
    const auto report = decide(suspect, view, clean);
    REQUIRE(report.has_value());
    CHECK(report->matches[0].diff.distance > 0);
  }
}

TEST_CASE("oracle completeness at small scale on toy_auth") {
  // Build an uncontaminated db, then check that a triggering execution
  // always yields a decide() report.
  targets::ToyAuth auth(Patch::kBackdoor);
  targets::ToyAuth markers(Patch::kMarkers);
  const auto seeds = make_seed_inputs(
      std::vector<std::string>{"PASS test\n", "PASS aaaa\n"});
  auto contaminated = [&](const RepresentativeDb& db) {
    for (const auto& e : db.entries()) {
      if (execute(markers, std::span<const std::uint8_t>(
                               e.input.bytes.data(), e.input.bytes.size()))
              .ground_truth_triggered) {
        return true;
      }
    }
    return false;
  };
  // Deterministic seed scan: contamination puts a db outside this
  // property's hypothesis, so skip such seeds.
  RepresentativeDb db;
  bool have_db = false;
  for (std::uint64_t seed = 17; seed < 40 && !have_db; ++seed) {
    RepresentativeDb candidate =
        build_database(fuzz_loop(auth, seeds, 3000, seed));
    if (!contaminated(candidate)) {
      db = std::move(candidate);
      have_db = true;
    }
  }
  REQUIRE(have_db);
  const std::vector<std::string> triggers = {
      "PASS let_me_in\n", "PASS let_me_in", "PASS let_me_in\nextra\n"};
  for (const auto& s : triggers) {
    const ExecutionTrace t = execute(auth, s);
    REQUIRE(t.ground_truth_triggered);
    const auto report =
        decide(test::input_of(s, 1000), erase_ground_truth(t), db);
    CHECK(report.has_value());
  }
}

TEST_CASE("oracle module interface never mentions ground-truth state") {
  // Interface audit: the oracle header must not name the trigger flag;
  // the decision path works on erased views only.
  const std::string header =
      read_file(fs::path(ROSA_SOURCE_DIR) / "include/rosa/oracle.hpp");
  CHECK(header.find("ground_truth") == std::string::npos);
  CHECK(header.find("triggered") == std::string::npos);
  CHECK(header.find("TraceView") != std::string::npos);

  // Campaign audit: labeling and contamination checks go through the
  // marker twin helper, and the fuzzer module stays flag-free too.
  const std::string fuzzer =
      read_file(fs::path(ROSA_SOURCE_DIR) / "include/rosa/fuzzer.hpp");
  CHECK(fuzzer.find("ground_truth") == std::string::npos);
}
