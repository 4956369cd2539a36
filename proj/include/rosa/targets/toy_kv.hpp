// toy_kv: a key-value store CLI whose backdoor's syscall classes are all
// individually common across benign families -- only their combination
// diverges.
//
// The tool processes a single command (first input line): GET, PUT, DEL,
// LIST, LOCK. The secret GET key dumps the whole store and scrubs the
// access journal, an OPEN+READ+CLOSE+WRITE+UNLINK combination no benign
// command produces, although every one of those classes appears in some
// benign family.

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyKv final : public Target {
 public:
  explicit ToyKv(Patch patch) : patch_(patch) {}

  static constexpr std::string_view kSecretKey = "m4st3r";

  std::string_view name() const override { return "toy_kv"; }
  std::uint32_t edge_namespace_size() const override { return 40; }

  std::vector<std::string> dictionary_hints() const override {
    return {"GET ", "PUT ", "DEL ", "LIST", "LOCK "};
  }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    using namespace detail;

    rec.syscall(SyscallClass::Read);
    rec.edge(kEntry);

    std::string_view rest = as_view(input);
    const std::string_view line = next_line(rest, rec).value_or("");
    if (line.empty()) {
      rec.edge(kEmptyCommand);
      rec.syscall(SyscallClass::Write);
      rec.set_exit_status(2);
      return;
    }
    const auto [cmd, arg] = split_command(line);

    if (cmd == "GET") {
      rec.edge(kGet);
      if (arg.empty()) {
        rec.edge(kGetNoKey);
        rec.syscall(SyscallClass::Write);
        rec.set_exit_status(1);
        return;
      }
      // --- backdoor ---
      if (rec.compare(kCmpSecret, arg, kSecretKey)) {
        rec.edge(kBackdoorHit);
        rec.mark_triggered();
        if (patch_ == Patch::kBackdoor) {
          rec.syscall(SyscallClass::Open);    // open the full store
          rec.syscall(SyscallClass::Read);    // dump every entry
          rec.syscall(SyscallClass::Close);
          rec.syscall(SyscallClass::Write);   // exfiltrate
          rec.syscall(SyscallClass::Unlink);  // scrub the access journal
        } else {
          rec.syscall(SyscallClass::Write);  // marker print
        }
        return;
      }
      // --- end backdoor ---
      if (key_exists(arg)) {
        rec.edge(kGetHit);
        rec.syscall(SyscallClass::Open);
        rec.syscall(SyscallClass::Read);
        rec.syscall(SyscallClass::Close);
        rec.syscall(SyscallClass::Write);
      } else {
        rec.edge(kGetMiss);
        rec.syscall(SyscallClass::Open);
        rec.syscall(SyscallClass::Close);
        rec.syscall(SyscallClass::Write);
        rec.set_exit_status(1);
      }
    } else if (cmd == "PUT") {
      const auto [key, value] = split_command(arg);
      if (key.empty()) {
        rec.edge(kPutNoKey);
        rec.syscall(SyscallClass::Write);
        rec.set_exit_status(1);
        return;
      }
      (void)value;
      rec.edge(kPut);
      rec.syscall(SyscallClass::Open);
      rec.syscall(SyscallClass::Write);
      rec.syscall(SyscallClass::Close);
    } else if (cmd == "DEL") {
      if (!arg.empty() && key_exists(arg)) {
        rec.edge(kDelHit);
        rec.syscall(SyscallClass::Unlink);
        rec.syscall(SyscallClass::Write);
      } else {
        rec.edge(kDelMiss);
        rec.syscall(SyscallClass::Write);
        rec.set_exit_status(1);
      }
    } else if (cmd == "LIST") {
      rec.edge(kList);
      rec.syscall(SyscallClass::Stat);
      rec.syscall(SyscallClass::Write);
    } else if (cmd == "LOCK") {
      rec.edge(kLock);
      rec.syscall(SyscallClass::Chmod);
      rec.syscall(SyscallClass::Write);
    } else {
      rec.edge(kUnknownCommand);
      rec.syscall(SyscallClass::Write);
      rec.set_exit_status(2);
    }
  }

 private:
  enum : EdgeId {
    kEntry = 0,
    kEmptyCommand = 1,
    kGet = 2,
    kGetNoKey = 3,
    kGetHit = 4,
    kGetMiss = 5,
    kPut = 6,
    kPutNoKey = 7,
    kDelHit = 8,
    kDelMiss = 9,
    kList = 10,
    kLock = 11,
    kUnknownCommand = 12,
    kBackdoorHit = 13,
    kCmpSecret = 16,  // 16..32
  };

  // Deterministic stand-in for a store lookup.
  static bool key_exists(std::string_view key) {
    return (detail::fnv64(key) & 1) == 0;
  }

  Patch patch_;
};

}  // namespace rosa::targets
