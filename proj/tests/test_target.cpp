#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <set>

#include "helpers.hpp"
#include "rosa/benchmark.hpp"

using namespace rosa;
using rosa::targets::Patch;

namespace {

std::vector<SyscallClass> classes_of(const ExecutionTrace& t) {
  return t.syscalls.classes();
}

// Random benign session material per target, used for closure and
// determinism sweeps.
std::string random_printable(std::mt19937_64& gen, std::size_t max_len) {
  std::uniform_int_distribution<int> len(0, static_cast<int>(max_len));
  std::uniform_int_distribution<int> ch(0x20, 0x7e);
  std::string s;
  const int n = len(gen);
  for (int i = 0; i < n; ++i) s += static_cast<char>(ch(gen));
  return s;
}

}  // namespace

TEST_CASE("toy_auth golden traces") {
  targets::ToyAuth auth(Patch::kBackdoor);

  SECTION("wrong password uses READ and WRITE only") {
    const auto t = execute(auth, "PASS wrong\n");
    CHECK(classes_of(t) ==
          std::vector<SyscallClass>{SyscallClass::Read, SyscallClass::Write});
    CHECK_FALSE(t.ground_truth_triggered);
    CHECK(t.exit_status == 1);
  }

  SECTION("backdoor password opens a root shell") {
    const auto t = execute(auth, "PASS let_me_in\n");
    CHECK(t.ground_truth_triggered);
    CHECK(t.syscalls.test(SyscallClass::Setuid));
    CHECK(t.syscalls.test(SyscallClass::Spawn));
    CHECK(t.syscalls.test(SyscallClass::Exec));
    CHECK(t.syscalls.test(SyscallClass::Setgid));
    CHECK(t.exit_status == 0);
  }

  SECTION("trailing session bytes after the first line are ignored") {
    const auto t = execute(auth, "PASS let_me_in\ngarbage");
    CHECK(t.ground_truth_triggered);
  }

  SECTION("legitimate password starts a user session without SETGID") {
    const auto t = execute(
        auth, std::string("PASS ") +
                  std::string(targets::ToyAuth::kRealPassword) + "\n");
    CHECK_FALSE(t.ground_truth_triggered);
    CHECK(t.syscalls.test(SyscallClass::Setuid));
    CHECK_FALSE(t.syscalls.test(SyscallClass::Setgid));
  }

  SECTION("the backdoor constant leaks through the comparison log") {
    const auto t = execute(auth, "PASS nope\n");
    bool found = false;
    for (const auto& rec : t.comparison_log) {
      if (rec.expected == "let_me_in") found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("empty input yields a valid untriggered trace on every bundled "
          "target") {
  for (const auto& pair : bundled_benchmark()) {
    const auto target = pair.make_backdoor();
    const auto t = execute(*target, "");
    CHECK_FALSE(t.ground_truth_triggered);
    CHECK(!t.edge_set.empty());
  }
}

TEST_CASE("bundled targets are deterministic over repeated executions") {
  std::mt19937_64 gen(0x12345);
  for (const auto& pair : bundled_benchmark()) {
    const auto target = pair.make_backdoor();
    std::vector<std::string> inputs = pair.default_seeds;
    inputs.push_back(random_printable(gen, 60));
    inputs.push_back("\x00\xff\x7f random\n");
    for (const auto& in : inputs) {
      const std::string first = encode_trace(execute(*target, in));
      for (int i = 0; i < 100; ++i) {
        CHECK(encode_trace(execute(*target, in)) == first);
      }
    }
  }
}

TEST_CASE("markers fire exactly on the documented trigger conditions") {
  SECTION("toy_auth") {
    targets::ToyAuth markers(Patch::kMarkers);
    const std::vector<std::string> cases = {
        "",
        "PASS let_me_in\n",
        "PASS let_me_in",
        "PASS let_me_in \n",
        "PASS let_me_inx\n",
        "PASS  let_me_in\n",
        "pass let_me_in\n",
        "PASS let_me_i\n",
        "PASS wrong\nPASS let_me_in\n",  // only the first line counts
        "XASS let_me_in\n",
    };
    for (const auto& c : cases) {
      CHECK(execute(markers, c).ground_truth_triggered ==
            test::toy_auth_triggers(c));
    }
    std::mt19937_64 gen(0xa);
    for (int i = 0; i < 2000; ++i) {
      const std::string s = random_printable(gen, 24);
      CHECK(execute(markers, s).ground_truth_triggered ==
            test::toy_auth_triggers(s));
    }
  }

  SECTION("toy_kv") {
    targets::ToyKv markers(Patch::kMarkers);
    const std::vector<std::string> cases = {
        "GET m4st3r\n", "GET m4st3r", "GET m4st3rs\n", "GET m4st3\n",
        "PUT m4st3r x\n", "DEL m4st3r\n", "GETm4st3r\n", "GET  m4st3r\n",
    };
    for (const auto& c : cases) {
      CHECK(execute(markers, c).ground_truth_triggered ==
            test::toy_kv_triggers(c));
    }
  }

  SECTION("toy_log triggers from three distinct command families") {
    targets::ToyLog backdoor(Patch::kBackdoor);
    CHECK(execute(backdoor, "ADD see xyzzy here\n").ground_truth_triggered);
    CHECK(execute(backdoor, "GREP xyzzy\n").ground_truth_triggered);
    CHECK(execute(backdoor, "DEL 4xyzzy\n").ground_truth_triggered);
    CHECK_FALSE(execute(backdoor, "ADD nothing\n").ground_truth_triggered);
    CHECK_FALSE(execute(backdoor, "xyzzy\n").ground_truth_triggered);
    CHECK_FALSE(execute(backdoor, "DEL 44\n").ground_truth_triggered);
  }

  SECTION("toy_img triggers on the raw tag, not the unmasked constant") {
    targets::ToyImg markers(Patch::kMarkers);
    auto image_with_tag = [](std::uint32_t tag) {
      std::string img = "IMG1";
      img += '\x08';
      img += std::string("\x02\x00\x02\x00", 4);
      for (int i = 0; i < 4; ++i) {
        img += static_cast<char>((tag >> (8 * i)) & 0xff);
      }
      img += "pxpx";
      return img;
    };
    CHECK(execute(markers, image_with_tag(targets::ToyImg::kTriggerTag))
              .ground_truth_triggered);
    CHECK_FALSE(execute(markers, image_with_tag(0xDEADBEEF))
                    .ground_truth_triggered);
    CHECK_FALSE(execute(markers, image_with_tag(0)).ground_truth_triggered);
  }

  SECTION("toy_ftp trigger works before login") {
    targets::ToyFtp markers(Patch::kMarkers);
    CHECK(execute(markers, "HELP ACIDBITCHEZ\n").ground_truth_triggered);
    CHECK(execute(markers, "USER anon\nHELP ACIDBITCHEZ\nQUIT\n")
              .ground_truth_triggered);
    CHECK_FALSE(execute(markers, "HELP\n").ground_truth_triggered);
    CHECK_FALSE(execute(markers, "HELP ACIDBITCHE\n").ground_truth_triggered);
    CHECK_FALSE(
        execute(markers, "QUIT\nHELP ACIDBITCHEZ\n").ground_truth_triggered);
  }

  SECTION("toy_xml triggers on the secret element name") {
    targets::ToyXml markers(Patch::kMarkers);
    CHECK(execute(markers, "<pwn3d></pwn3d>").ground_truth_triggered);
    CHECK(execute(markers, "<pwn3d/>").ground_truth_triggered);
    CHECK_FALSE(execute(markers, "<pwn3dx/>").ground_truth_triggered);
    CHECK_FALSE(execute(markers, "</pwn3d>").ground_truth_triggered);
    CHECK_FALSE(execute(markers, "pwn3d").ground_truth_triggered);
  }

  SECTION("backdoor and marker patches agree on the trigger predicate") {
    std::mt19937_64 gen(0x77);
    for (const auto& pair : bundled_benchmark()) {
      const auto backdoor = pair.make_backdoor();
      const auto markers = pair.make_markers();
      for (int i = 0; i < 500; ++i) {
        const std::string s = random_printable(gen, 40);
        CHECK(execute(*backdoor, s).ground_truth_triggered ==
              execute(*markers, s).ground_truth_triggered);
      }
    }
  }
}

TEST_CASE("benign-family closure: trigger vectors fall outside every "
          "benign vector") {
  std::mt19937_64 gen(0xc105e);
  for (const auto& pair : bundled_benchmark()) {
    const auto target = pair.make_backdoor();

    // Collect syscall vectors from seeds, documented families, and a
    // randomized sweep of untriggered inputs.
    std::set<std::vector<SyscallClass>> benign;
    std::vector<std::string> probes = pair.default_seeds;
    for (int i = 0; i < 4000; ++i) probes.push_back(random_printable(gen, 48));
    for (const auto& p : probes) {
      const auto t = execute(*target, p);
      if (!t.ground_truth_triggered) benign.insert(classes_of(t));
    }

    // Trigger inputs per target.
    std::vector<std::string> triggers;
    if (pair.name == "toy_auth") {
      triggers = {"PASS let_me_in\n"};
    } else if (pair.name == "toy_ftp") {
      triggers = {"HELP ACIDBITCHEZ\n", "USER anon\nPASS anon\nLIST\nHELP "
                                        "ACIDBITCHEZ\n"};
    } else if (pair.name == "toy_img") {
      std::string img = "IMG1";
      img += '\x08';
      img += std::string("\x02\x00\x02\x00", 4);
      for (int i = 0; i < 4; ++i) {
        img += static_cast<char>((targets::ToyImg::kTriggerTag >> (8 * i)) &
                                 0xff);
      }
      img += "pxpx";
      triggers = {img};
    } else if (pair.name == "toy_xml") {
      triggers = {"<pwn3d/>", "<a><pwn3d>x</pwn3d></a>"};
    } else if (pair.name == "toy_log") {
      triggers = {"ADD xyzzy\n", "GREP say xyzzy now\n", "DEL xyzzy\n"};
    } else if (pair.name == "toy_kv") {
      triggers = {"GET m4st3r\n"};
    }
    REQUIRE(!triggers.empty());

    for (const auto& trig : triggers) {
      const auto t = execute(*target, trig);
      REQUIRE(t.ground_truth_triggered);
      CHECK(benign.count(classes_of(t)) == 0);
    }
  }
}

TEST_CASE("documented families match observed vectors on exemplars") {
  // Spot-check that the registry's family documentation matches reality.
  targets::ToyKv kv(Patch::kBackdoor);
  const auto t = execute(kv, "LIST\n");
  CHECK(classes_of(t) == std::vector<SyscallClass>{SyscallClass::Read,
                                                   SyscallClass::Write,
                                                   SyscallClass::Stat});

  targets::ToyLog log(Patch::kBackdoor);
  const auto rot = execute(log, "ROT\n");
  CHECK(rot.syscalls.test(SyscallClass::Rename));
}

TEST_CASE("toy_kv backdoor combination is made of individually common "
          "classes") {
  targets::ToyKv kv(Patch::kBackdoor);
  const auto trig = execute(kv, "GET m4st3r\n");
  REQUIRE(trig.ground_truth_triggered);
  // Each class of the trigger vector appears in some benign family.
  const std::vector<std::string> benign_probes = {
      "GET alpha\n", "GET beta\n", "GET a\n", "GET b\n", "GET c\n",
      "PUT k v\n",   "DEL alpha\n", "DEL a\n", "DEL b\n", "LIST\n",
      "LOCK k\n"};
  SyscallVector benign_union;
  std::set<std::vector<SyscallClass>> benign_vectors;
  for (const auto& p : benign_probes) {
    const auto t = execute(kv, p);
    REQUIRE_FALSE(t.ground_truth_triggered);
    for (SyscallClass c : t.syscalls.classes()) benign_union.set(c);
    benign_vectors.insert(classes_of(t));
  }
  for (SyscallClass c : trig.syscalls.classes()) {
    CHECK(benign_union.test(c));
  }
  CHECK(benign_vectors.count(classes_of(trig)) == 0);
}

namespace {

// Test-only target that never terminates on its own.
class SpinTarget final : public Target {
 public:
  std::string_view name() const override { return "spin"; }
  std::uint32_t edge_namespace_size() const override { return 4; }
  std::uint64_t step_budget() const override { return 5000; }
  void run(std::span<const std::uint8_t>, TraceRecorder& rec) const override {
    rec.edge(0);
    rec.syscall(SyscallClass::Read);
    for (;;) {
      rec.tick();
      rec.edge(1);
    }
  }
};

}  // namespace

TEST_CASE("step budget exhaustion returns a partial trace with the "
          "timeout status") {
  SpinTarget spin;
  const auto t = execute(spin, "anything");
  CHECK(t.exit_status == kStepBudgetExceededStatus);
  CHECK(t.edge_set.contains(0));
  CHECK(t.edge_set.contains(1));
  CHECK(t.syscalls.test(SyscallClass::Read));
}

TEST_CASE("oversized inputs are rejected") {
  targets::ToyAuth auth(Patch::kBackdoor);
  const std::string big(kMaxInputSize + 1, 'a');
  CHECK_THROWS_AS(execute(auth, big), std::invalid_argument);
}

TEST_CASE("comparison gradient covers one edge per matched prefix length") {
  targets::ToyAuth auth(Patch::kBackdoor);
  // Successively longer prefixes of the backdoor password cover
  // successively more comparison-site edges.
  const auto t0 = execute(auth, "PASS qqqqq\n");
  const auto t3 = execute(auth, "PASS let_qq\n");
  const auto t8 = execute(auth, "PASS let_me_iq\n");
  CHECK(t3.edge_set.has_edge_outside(t0.edge_set));
  CHECK(t8.edge_set.has_edge_outside(t3.edge_set));
}
