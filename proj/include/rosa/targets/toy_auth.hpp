// toy_auth: a password-checking utility with a hard-coded credential
// backdoor, modeled on a sudo-style verifier with three password
// attempts.
//
// Input protocol: up to three lines of the form "PASS <password>"; a
// malformed line aborts with a usage error, a third failure locks the
// session out, and anything after the accepted lines is ignored. A
// correct password starts a session as the requested user (SETUID,
// SPAWN, EXEC). The legitimate check compares password *hashes*, so the
// comparison log never leaks the real password. The backdoor grants a
// root shell (SETUID, SETGID, SPAWN, EXEC) for the literal password
// "let_me_in", compared in plain text like a strcmp against a string
// constant; it is reachable at any of the three attempts, and the
// attempt number is a distinct input family (retries have emitted a
// prompt, so their syscall vectors differ).

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyAuth final : public Target {
 public:
  explicit ToyAuth(Patch patch) : patch_(patch) {}

  static constexpr std::string_view kBackdoorPassword = "let_me_in";
  static constexpr std::string_view kRealPassword =
      "correct-horse-battery-staple-42";
  static constexpr int kMaxAttempts = 3;

  std::string_view name() const override { return "toy_auth"; }
  std::uint32_t edge_namespace_size() const override { return 80; }

  std::vector<std::string> dictionary_hints() const override {
    return {"PASS "};
  }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    using namespace detail;

    rec.syscall(SyscallClass::Read);
    rec.edge(kEntry);

    std::string_view rest = as_view(input);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const EdgeId base = kAttemptBase + 4 * static_cast<EdgeId>(attempt);
      const std::string_view line = next_line(rest, rec).value_or("");

      const std::string_view head =
          line.substr(0, std::min<std::size_t>(5, line.size()));
      if (!rec.compare(kCmpCommand, head, "PASS ")) {
        rec.edge(base + kUsageError);
        rec.syscall(SyscallClass::Write);
        rec.set_exit_status(2);
        return;
      }

      const std::string_view password = line.substr(5);
      if (password.empty()) {
        rec.edge(base + kEmptyPassword);
        rec.syscall(SyscallClass::Write);
        rec.set_exit_status(1);
        return;
      }

      // Legitimate check against the stored hash.
      const std::string given = le_bytes(fnv64(password), 8);
      const std::string stored = le_bytes(fnv64(kRealPassword), 8);
      if (rec.compare(kCmpHash, given, stored)) {
        rec.edge(kAuthOk);
        rec.syscall(SyscallClass::Setuid);
        rec.syscall(SyscallClass::Spawn);
        rec.syscall(SyscallClass::Exec);
        return;
      }

      // --- backdoor ---
      if (rec.compare(kCmpBackdoor, password, kBackdoorPassword)) {
        rec.edge(kBackdoorHit);
        rec.mark_triggered();
        if (patch_ == Patch::kBackdoor) {
          rec.syscall(SyscallClass::Setuid);
          rec.syscall(SyscallClass::Setgid);
          rec.syscall(SyscallClass::Spawn);
          rec.syscall(SyscallClass::Exec);
        } else {
          rec.syscall(SyscallClass::Write);  // marker print
        }
        return;
      }
      // --- end backdoor ---

      rec.edge(base + kWrongPassword);
      rec.syscall(SyscallClass::Write);  // error / retry prompt
      rec.set_exit_status(1);
      rec.edge(base + kAttemptDone);
    }
    rec.edge(kLockout);
    rec.syscall(SyscallClass::Write);
    rec.set_exit_status(1);
  }

 private:
  // Per-attempt edges live at kAttemptBase + 4 * attempt + offset.
  enum : EdgeId {
    kEntry = 0,
    kAttemptBase = 1,
    kUsageError = 0,
    kEmptyPassword = 1,
    kWrongPassword = 2,
    kAttemptDone = 3,
    kAuthOk = 13,
    kBackdoorHit = 14,
    kLockout = 15,
    kCmpCommand = 16,   // 16..32
    kCmpHash = 33,      // 33..49
    kCmpBackdoor = 50,  // 50..66
  };

  Patch patch_;
};

}  // namespace rosa::targets
