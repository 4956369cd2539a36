// toy_img: a binary image-header parser whose backdoor fires on a magic
// metadata value.
//
// Layout (little-endian):
//   [0..4)  magic "IMG1"
//   [4]     depth: 1, 8 or 24 bits per pixel
//   [5..7)  width  (1..64)
//   [7..9)  height (1..64)
//   [9..13) metadata tag
//   [13..)  pixel data
//
// The metadata check compares an obfuscated copy of the tag (XOR with a
// fixed mask) against a constant, so the harvested dictionary token does
// not trigger when inserted verbatim; only byte-wise progress through the
// comparison gradient reaches the key, which keeps this trigger slower to
// discover than the plain-text ones.

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyImg final : public Target {
 public:
  explicit ToyImg(Patch patch) : patch_(patch) {}

  static constexpr std::uint32_t kMetaMask = 0xA5A5A5A5;
  static constexpr std::uint32_t kMetaMagic = 0xDEADBEEF;
  // Raw on-disk tag that triggers: kMetaMagic ^ kMetaMask.
  static constexpr std::uint32_t kTriggerTag = kMetaMagic ^ kMetaMask;
  static constexpr std::size_t kHeaderSize = 13;

  std::string_view name() const override { return "toy_img"; }
  std::uint32_t edge_namespace_size() const override { return 56; }

  std::vector<std::string> dictionary_hints() const override {
    return {"IMG1"};
  }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    using namespace detail;

    rec.syscall(SyscallClass::Open);
    rec.syscall(SyscallClass::Read);
    rec.edge(kEntry);
    rec.tick(input.size() + 1);

    if (input.size() < kHeaderSize) {
      rec.edge(kShortHeader);
      fail(rec);
      return;
    }
    if (!rec.compare(kCmpMagic, as_view(input).substr(0, 4), "IMG1")) {
      rec.edge(kBadMagic);
      fail(rec);
      return;
    }
    const std::uint8_t depth = input[4];
    if (depth != 1 && depth != 8 && depth != 24) {
      rec.edge(kBadDepth);
      fail(rec);
      return;
    }
    const std::uint32_t width = read_u16le(input, 5);
    const std::uint32_t height = read_u16le(input, 7);
    if (width == 0 || width > 64 || height == 0 || height > 64) {
      rec.edge(kBadDims);
      fail(rec);
      return;
    }

    const std::uint32_t tag = read_u32le(input, 9);
    // --- backdoor ---
    const std::string obfuscated = le_bytes(tag ^ kMetaMask, 4);
    const std::string expected = le_bytes(kMetaMagic, 4);
    if (rec.compare(kCmpMeta, obfuscated, expected)) {
      rec.edge(kBackdoorHit);
      rec.mark_triggered();
      if (patch_ == Patch::kBackdoor) {
        rec.syscall(SyscallClass::Spawn);
        rec.syscall(SyscallClass::Exec);
      } else {
        rec.syscall(SyscallClass::Write);  // marker print
      }
      // Parsing continues: the hook hides itself.
    } else {
      rec.edge(kPlainMeta);
    }
    // --- end backdoor ---

    const std::size_t pixel_bytes =
        (static_cast<std::size_t>(width) * height * depth + 7) / 8;
    if (input.size() - kHeaderSize < pixel_bytes) {
      rec.edge(kTruncatedPixels);
      fail(rec);
      return;
    }

    rec.syscall(SyscallClass::Mmap);
    std::uint32_t checksum = 0;
    for (std::size_t i = 0; i < pixel_bytes; ++i) {
      rec.tick();
      checksum += input[kHeaderSize + i];
    }
    (void)checksum;

    switch (depth) {
      case 1: rec.edge(kOkDepth1); break;
      case 8: rec.edge(kOkDepth8); break;
      default: rec.edge(kOkDepth24); break;
    }
    if (static_cast<std::size_t>(width) * height > 256) {
      rec.edge(kLargeImage);
    }
    rec.syscall(SyscallClass::Write);
    rec.syscall(SyscallClass::Close);
  }

 private:
  enum : EdgeId {
    kEntry = 0,
    kShortHeader = 1,
    kBadMagic = 2,
    kBadDepth = 3,
    kBadDims = 4,
    kPlainMeta = 5,
    kBackdoorHit = 6,
    kTruncatedPixels = 7,
    kOkDepth1 = 8,
    kOkDepth8 = 9,
    kOkDepth24 = 10,
    kLargeImage = 11,
    kCmpMagic = 16,  // 16..32
    kCmpMeta = 33,   // 33..49
  };

  static void fail(TraceRecorder& rec) {
    rec.syscall(SyscallClass::Write);
    rec.syscall(SyscallClass::Close);
    rec.set_exit_status(1);
  }

  Patch patch_;
};

}  // namespace rosa::targets
