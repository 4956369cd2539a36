// toy_xml: a small markup parser whose backdoor fires on a secret element
// name.
//
// Recognized syntax: elements <name>...</name> (self-closing <name/>),
// comments <!-- -->, processing instructions <? ?>, and entities &name;
// where "amp", "lt" and "gt" expand inline and "file" loads an external
// resource. Malformed input aborts with a fatal error path.

#pragma once

#include "rosa/targets/detail.hpp"

namespace rosa::targets {

class ToyXml final : public Target {
 public:
  explicit ToyXml(Patch patch) : patch_(patch) {}

  static constexpr std::string_view kSecretElement = "pwn3d";
  static constexpr std::size_t kMaxDepth = 16;

  std::string_view name() const override { return "toy_xml"; }
  std::uint32_t edge_namespace_size() const override { return 72; }

  std::vector<std::string> dictionary_hints() const override {
    return {"<", ">", "</", "/>", "<!--", "-->", "&", ";"};
  }

  void run(std::span<const std::uint8_t> input,
           TraceRecorder& rec) const override {
    using namespace detail;

    rec.syscall(SyscallClass::Read);
    rec.edge(kEntry);

    const std::string_view text = as_view(input);
    std::vector<std::string_view> stack;
    std::size_t i = 0;

    while (i < text.size()) {
      rec.tick();
      const char c = text[i];
      if (c == '<') {
        if (text.compare(i, 4, "<!--") == 0) {
          const auto end = text.find("-->", i + 4);
          if (end == std::string_view::npos) {
            rec.edge(kUnterminatedComment);
            fatal(rec);
            return;
          }
          rec.edge(kComment);
          rec.tick(end - i);
          i = end + 3;
          continue;
        }
        if (text.compare(i, 2, "<?") == 0) {
          const auto end = text.find("?>", i + 2);
          if (end == std::string_view::npos) {
            rec.edge(kUnterminatedPi);
            fatal(rec);
            return;
          }
          rec.edge(kProcessingInstruction);
          rec.tick(end - i);
          i = end + 2;
          continue;
        }
        const bool closing = text.compare(i, 2, "</") == 0;
        std::size_t j = i + (closing ? 2 : 1);
        const std::size_t name_start = j;
        while (j < text.size() && is_name_char(text[j])) {
          rec.tick();
          ++j;
        }
        const std::string_view tag_name =
            text.substr(name_start, j - name_start);
        bool self_closing = false;
        if (!closing && text.compare(j, 2, "/>") == 0) {
          self_closing = true;
          j += 2;
        } else if (j < text.size() && text[j] == '>') {
          j += 1;
        } else {
          rec.edge(kUnterminatedTag);
          fatal(rec);
          return;
        }
        if (tag_name.empty()) {
          rec.edge(kEmptyTagName);
          fatal(rec);
          return;
        }
        if (closing) {
          rec.edge(kCloseTag);
          if (stack.empty() || stack.back() != tag_name) {
            rec.edge(kMismatchedClose);
            fatal(rec);
            return;
          }
          rec.edge(kMatchedClose);
          stack.pop_back();
        } else {
          rec.edge(kOpenTag);
          // --- backdoor ---
          if (rec.compare(kCmpSecret, tag_name, kSecretElement)) {
            rec.edge(kBackdoorHit);
            rec.mark_triggered();
            if (patch_ == Patch::kBackdoor) {
              rec.syscall(SyscallClass::Spawn);
              rec.syscall(SyscallClass::Exec);
            } else {
              rec.syscall(SyscallClass::Write);  // marker print
            }
          }
          // --- end backdoor ---
          if (self_closing) {
            rec.edge(kSelfClosing);
          } else {
            if (stack.size() >= kMaxDepth) {
              rec.edge(kTooDeep);
              fatal(rec);
              return;
            }
            stack.push_back(tag_name);
          }
        }
        i = j;
      } else if (c == '&') {
        const auto end = text.find(';', i + 1);
        if (end == std::string_view::npos || end - i > 12) {
          rec.edge(kUnterminatedEntity);
          fatal(rec);
          return;
        }
        const std::string_view entity = text.substr(i + 1, end - i - 1);
        if (rec.compare(kCmpEntity, entity, "file")) {
          rec.edge(kExternalEntity);
          rec.syscall(SyscallClass::Open);
          rec.syscall(SyscallClass::Read);
          rec.syscall(SyscallClass::Close);
        } else if (entity == "amp" || entity == "lt" || entity == "gt") {
          rec.edge(kKnownEntity);
        } else {
          rec.edge(kUnknownEntity);
          fatal(rec);
          return;
        }
        rec.tick(end - i);
        i = end + 1;
      } else {
        // character data
        ++i;
      }
    }

    if (!stack.empty()) {
      rec.edge(kUnclosedElements);
      fatal(rec);
      return;
    }
    rec.edge(kParseOk);
    rec.syscall(SyscallClass::Write);
  }

 private:
  enum : EdgeId {
    kEntry = 0,
    kComment = 1,
    kUnterminatedComment = 2,
    kProcessingInstruction = 3,
    kUnterminatedPi = 4,
    kOpenTag = 5,
    kCloseTag = 6,
    kMatchedClose = 7,
    kMismatchedClose = 8,
    kSelfClosing = 9,
    kTooDeep = 10,
    kEmptyTagName = 11,
    kUnterminatedTag = 12,
    kBackdoorHit = 13,
    kExternalEntity = 14,
    kKnownEntity = 15,
    kUnknownEntity = 16,
    kUnterminatedEntity = 17,
    kUnclosedElements = 18,
    kParseOk = 19,
    kCmpSecret = 32,  // 32..48
    kCmpEntity = 49,  // 49..65
  };

  static bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  static void fatal(TraceRecorder& rec) {
    rec.syscall(SyscallClass::Write);
    rec.syscall(SyscallClass::Exit);
    rec.set_exit_status(1);
  }

  Patch patch_;
};

}  // namespace rosa::targets
