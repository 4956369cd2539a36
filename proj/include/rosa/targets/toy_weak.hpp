// toy_weak: a deliberately fragile fixture target whose trigger condition
// is weak enough that short phase-1 campaigns already hit it, producing
// backdoor contamination. Used by tests and excluded from the default
// benchmark list.

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyWeak final : public Target {
 public:
  explicit ToyWeak(Patch patch) : patch_(patch) {}

  // Any input whose first byte is >= kTriggerThreshold triggers.
  static constexpr std::uint8_t kTriggerThreshold = 0xC8;

  std::string_view name() const override { return "toy_weak"; }
  std::uint32_t edge_namespace_size() const override { return 8; }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    rec.syscall(SyscallClass::Read);
    rec.edge(kEntry);
    rec.tick(input.size() + 1);

    if (input.empty()) {
      rec.edge(kEmptyInput);
      rec.syscall(SyscallClass::Write);
      return;
    }
    // --- backdoor ---
    if (input[0] >= kTriggerThreshold) {
      rec.edge(kBackdoorHit);
      rec.mark_triggered();
      if (patch_ == Patch::kBackdoor) {
        rec.syscall(SyscallClass::Exec);
      } else {
        rec.syscall(SyscallClass::Write);  // marker print
      }
      return;
    }
    // --- end backdoor ---
    if (input[0] >= 'a' && input[0] <= 'z') {
      rec.edge(kLowercase);
    } else {
      rec.edge(kOther);
    }
    if (input.size() > 16) {
      rec.edge(kLongInput);
    }
    rec.syscall(SyscallClass::Write);
  }

 private:
  enum : EdgeId {
    kEntry = 0,
    kEmptyInput = 1,
    kBackdoorHit = 2,
    kLowercase = 3,
    kOther = 4,
    kLongInput = 5,
  };

  Patch patch_;
};

}  // namespace rosa::targets
