// toy_log: a log-management tool whose backdoor key is reachable from
// several input families.
//
// Commands (one per line): ADD <text>, GREP <pattern>, DEL <index>, ROT.
// The backdoor fires when the argument of ADD, GREP or DEL *contains* the
// secret token, so triggering inputs exist inside three distinct
// families. Contaminating one family's representatives in phase 1 does
// not mask triggers reached through the others.

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyLog final : public Target {
 public:
  explicit ToyLog(Patch patch) : patch_(patch) {}

  static constexpr std::string_view kSecretToken = "xyzzy";
  static constexpr std::size_t kMaxLines = 64;

  std::string_view name() const override { return "toy_log"; }
  std::uint32_t edge_namespace_size() const override { return 40; }

  std::vector<std::string> dictionary_hints() const override {
    return {"ADD ", "GREP ", "DEL ", "ROT"};
  }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    using namespace detail;

    rec.syscall(SyscallClass::Read);
    rec.edge(kEntry);

    std::string_view rest = as_view(input);
    for (std::size_t n = 0; n < kMaxLines; ++n) {
      const auto maybe_line = next_line(rest, rec);
      if (!maybe_line) break;
      const std::string_view line = *maybe_line;
      if (line.empty()) {
        rec.edge(kEmptyLine);
        continue;
      }
      const auto [cmd, arg] = split_command(line);

      if (cmd == "ADD") {
        rec.edge(kAdd);
        rec.syscall(SyscallClass::Open);
        rec.syscall(SyscallClass::Write);
        rec.syscall(SyscallClass::Close);
        scan_for_secret(arg, rec);
      } else if (cmd == "GREP") {
        rec.edge(kGrep);
        rec.syscall(SyscallClass::Open);
        rec.syscall(SyscallClass::Read);
        rec.syscall(SyscallClass::Close);
        rec.syscall(SyscallClass::Write);
        scan_for_secret(arg, rec);
      } else if (cmd == "DEL") {
        const bool numeric =
            !arg.empty() && arg.find_first_not_of("0123456789") ==
                                std::string_view::npos;
        if (numeric) {
          rec.edge(kDelOk);
          rec.syscall(SyscallClass::Stat);
          rec.syscall(SyscallClass::Unlink);
          rec.syscall(SyscallClass::Write);
        } else {
          rec.edge(kDelBadIndex);
          rec.syscall(SyscallClass::Write);
          scan_for_secret(arg, rec);
        }
      } else if (cmd == "ROT") {
        rec.edge(kRotate);
        rec.syscall(SyscallClass::Rename);
        rec.syscall(SyscallClass::Write);
      } else {
        rec.edge(kUnknownCommand);
        rec.syscall(SyscallClass::Write);
      }
    }
  }

 private:
  enum : EdgeId {
    kEntry = 0,
    kAdd = 1,
    kGrep = 2,
    kDelOk = 3,
    kDelBadIndex = 4,
    kRotate = 5,
    kEmptyLine = 6,
    kUnknownCommand = 7,
    kBackdoorHit = 8,
    kCmpSecret = 16,  // 16..32
  };

  void scan_for_secret(std::string_view arg, TraceRecorder& rec) const {
    // --- backdoor ---
    if (rec.compare_find(kCmpSecret, arg, kSecretToken)) {
      rec.edge(kBackdoorHit);
      rec.mark_triggered();
      if (patch_ == Patch::kBackdoor) {
        rec.syscall(SyscallClass::Unlink);
        rec.syscall(SyscallClass::Spawn);
        rec.syscall(SyscallClass::Exec);
      } else {
        rec.syscall(SyscallClass::Write);  // marker print
      }
    }
    // --- end backdoor ---
  }

  Patch patch_;
};

}  // namespace rosa::targets
