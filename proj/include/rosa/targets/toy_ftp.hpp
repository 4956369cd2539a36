// toy_ftp: a line-protocol file server session with a hidden command.
//
// The input blob encodes one session, one command per line. Anonymous
// login ("USER anon" / "PASS anon") unlocks the transfer commands. The
// backdoor is a secret HELP argument that opens a root shell, available
// before authentication.

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyFtp final : public Target {
 public:
  explicit ToyFtp(Patch patch) : patch_(patch) {}

  static constexpr std::string_view kSecretHelpArg = "ACIDBITCHEZ";
  static constexpr std::size_t kMaxLines = 64;

  std::string_view name() const override { return "toy_ftp"; }
  std::uint32_t edge_namespace_size() const override { return 72; }

  std::vector<std::string> dictionary_hints() const override {
    return {"USER ", "PASS ", "LIST", "RETR ", "STOR ", "HELP ", "QUIT"};
  }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    using namespace detail;

    rec.syscall(SyscallClass::Socket);
    rec.syscall(SyscallClass::Bind);
    rec.edge(kEntry);

    std::string_view rest = as_view(input);
    std::string_view user;
    bool have_user = false;
    bool logged_in = false;

    for (std::size_t n = 0; n < kMaxLines; ++n) {
      const auto maybe_line = next_line(rest, rec);
      if (!maybe_line) break;
      const std::string_view line = *maybe_line;
      if (line.empty()) {
        rec.edge(kEmptyLine);
        continue;
      }
      rec.syscall(SyscallClass::Recv);
      const auto [cmd, arg] = split_command(line);

      if (cmd == "USER") {
        rec.edge(kUser);
        user = arg;
        have_user = true;
        rec.syscall(SyscallClass::Send);
      } else if (cmd == "PASS") {
        if (!have_user) {
          rec.edge(kPassNoUser);
          rec.syscall(SyscallClass::Send);
          continue;
        }
        rec.edge(kPassAfterUser);
        std::string cred(user);
        cred += ':';
        cred += arg;
        if (rec.compare(kCmpCredentials, cred, "anon:anon")) {
          rec.edge(kLoginOk);
          logged_in = true;
        } else {
          rec.edge(kLoginFail);
        }
        rec.syscall(SyscallClass::Send);
      } else if (cmd == "LIST") {
        if (logged_in) {
          rec.edge(kListOk);
          rec.syscall(SyscallClass::Open);
          rec.syscall(SyscallClass::Stat);
          rec.syscall(SyscallClass::Read);
          rec.syscall(SyscallClass::Close);
        } else {
          rec.edge(kListDenied);
        }
        rec.syscall(SyscallClass::Send);
      } else if (cmd == "RETR") {
        if (!logged_in) {
          rec.edge(kRetrDenied);
          rec.syscall(SyscallClass::Send);
        } else if (arg.empty()) {
          rec.edge(kRetrNoArg);
          rec.syscall(SyscallClass::Send);
        } else {
          rec.edge(kRetrOk);
          rec.syscall(SyscallClass::Open);
          rec.syscall(SyscallClass::Read);
          rec.syscall(SyscallClass::Close);
          rec.syscall(SyscallClass::Send);
        }
      } else if (cmd == "STOR") {
        if (logged_in) {
          rec.edge(kStorOk);
          rec.syscall(SyscallClass::Open);
          rec.syscall(SyscallClass::Write);
          rec.syscall(SyscallClass::Close);
        } else {
          rec.edge(kStorDenied);
        }
        rec.syscall(SyscallClass::Send);
      } else if (cmd == "HELP") {
        rec.edge(kHelp);
        rec.syscall(SyscallClass::Send);
        // --- backdoor ---
        if (rec.compare(kCmpSecret, arg, kSecretHelpArg)) {
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
      } else if (cmd == "QUIT") {
        rec.edge(kQuit);
        rec.syscall(SyscallClass::Send);
        break;
      } else {
        rec.edge(kUnknownCommand);
        rec.syscall(SyscallClass::Send);
      }
    }
  }

 private:
  enum : EdgeId {
    kEntry = 0,
    kUser = 1,
    kPassNoUser = 2,
    kPassAfterUser = 3,
    kLoginOk = 4,
    kLoginFail = 5,
    kListOk = 6,
    kListDenied = 7,
    kRetrDenied = 8,
    kStorDenied = 9,
    kRetrOk = 10,
    kRetrNoArg = 11,
    kStorOk = 12,
    kHelp = 13,
    kBackdoorHit = 14,
    kQuit = 15,
    kUnknownCommand = 16,
    kEmptyLine = 17,
    kCmpCredentials = 32,  // 32..48
    kCmpSecret = 49,       // 49..65
  };

  Patch patch_;
};

}  // namespace rosa::targets
