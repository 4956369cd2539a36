// Directory-level persistence: seed directories, corpus directories with
// manifests, representative databases, and report files.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rosa/oracle.hpp"
#include "rosa/serialization.hpp"

namespace rosa {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

inline void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("short write to " + path.string());
}

inline std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  const std::string s = read_file(path);
  return {s.begin(), s.end()};
}

namespace detail {
inline std::string zero_padded(std::uint64_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llu", width,
                static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace detail

// --- seeds ------------------------------------------------------------------

// Reads every regular file of a directory as one raw seed input, in
// filename order so campaigns are reproducible.
inline std::vector<std::vector<std::uint8_t>> load_seed_dir(
    const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("seed directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::vector<std::uint8_t>> seeds;
  seeds.reserve(files.size());
  for (const auto& f : files) seeds.push_back(read_bytes(f));
  return seeds;
}

// --- corpus -----------------------------------------------------------------

inline void save_corpus(const fs::path& dir, const Corpus& corpus,
                        std::string_view target_name) {
  fs::create_directories(dir);
  std::ostringstream manifest;
  manifest << "rosa-corpus v1\n";
  manifest << "alphabet: " << kSyscallAlphabetVersion << '\n';
  manifest << "target: " << target_name << '\n';
  manifest << "entries: " << corpus.size() << '\n';
  for (const auto& e : corpus.entries()) {
    const std::string stem = detail::zero_padded(e.input.id, 6);
    const std::string input_name = "input_" + stem + ".bin";
    const std::string trace_name = "trace_" + stem + ".txt";
    write_file(dir / input_name, e.input.as_view());
    write_file(dir / trace_name, encode_trace(e.trace));
    manifest << "entry: " << e.input.id << ' '
             << (e.input.parent_id ? std::to_string(*e.input.parent_id)
                                   : std::string("-"))
             << ' ' << to_string(e.input.origin) << ' ' << input_name << ' '
             << trace_name << '\n';
  }
  write_file(dir / "manifest.txt", std::move(manifest).str());
}

inline Corpus load_corpus(const fs::path& dir) {
  const std::string text = read_file(dir / "manifest.txt");
  serial::LineReader reader(text);
  serial::expect_header(reader, "rosa-corpus v1");
  serial::expect_alphabet(reader);
  reader.field("target");
  const auto n = serial::parse_int<std::size_t>(reader.field("entries"));
  Corpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    const auto toks = serial::split_tokens(reader.field("entry"));
    if (toks.size() != 5) throw ParseError("malformed corpus entry line");
    TestInput input;
    input.id = serial::parse_int<std::uint64_t>(toks[0]);
    if (toks[1] != "-") {
      input.parent_id = serial::parse_int<std::uint64_t>(toks[1]);
    }
    input.origin = origin_from_string(toks[2]);
    input.bytes = read_bytes(dir / std::string(toks[3]));
    ExecutionTrace trace = decode_trace(read_file(dir / std::string(toks[4])));
    corpus.insert(std::move(input), std::move(trace), i);
  }
  return corpus;
}

// --- representative database -------------------------------------------------

inline void save_database(const fs::path& dir, const RepresentativeDb& db,
                          std::string_view target_name) {
  fs::create_directories(dir);
  std::ostringstream manifest;
  manifest << "rosa-db v1\n";
  manifest << "alphabet: " << kSyscallAlphabetVersion << '\n';
  manifest << "target: " << target_name << '\n';
  manifest << "entries: " << db.size() << '\n';
  for (const auto& e : db.entries()) {
    const std::string stem = detail::zero_padded(e.rep_id, 4);
    const std::string input_name = "rep_" + stem + "_input.bin";
    const std::string view_name = "rep_" + stem + "_trace.txt";
    write_file(dir / input_name, e.input.as_view());
    write_file(dir / view_name, encode_view({e.edge_set, e.syscalls}));
    char fphex[17];
    std::snprintf(fphex, sizeof(fphex), "%016llx",
                  static_cast<unsigned long long>(fingerprint(e.edge_set)));
    manifest << "entry: " << e.rep_id << ' ' << fphex << ' ' << input_name
             << ' ' << view_name << '\n';
  }
  write_file(dir / "manifest.txt", std::move(manifest).str());
}

struct LoadedDatabase {
  std::string target;
  RepresentativeDb db;
};

inline LoadedDatabase load_database(const fs::path& dir) {
  const std::string text = read_file(dir / "manifest.txt");
  serial::LineReader reader(text);
  serial::expect_header(reader, "rosa-db v1");
  serial::expect_alphabet(reader);
  LoadedDatabase loaded;
  loaded.target = std::string(reader.field("target"));
  const auto n = serial::parse_int<std::size_t>(reader.field("entries"));
  for (std::size_t i = 0; i < n; ++i) {
    const auto toks = serial::split_tokens(reader.field("entry"));
    if (toks.size() != 4) throw ParseError("malformed db entry line");
    const auto rep_id = serial::parse_int<std::uint64_t>(toks[0]);
    if (rep_id != i) throw ParseError("db entries out of order");
    TestInput input;
    input.id = rep_id;
    input.bytes = read_bytes(dir / std::string(toks[2]));
    const TraceView view = decode_view(read_file(dir / std::string(toks[3])));
    loaded.db.add(std::move(input), view.edge_set, view.syscalls);
  }
  return loaded;
}

// --- reports ----------------------------------------------------------------

inline std::string report_filename(std::uint64_t index) {
  return "report_" + detail::zero_padded(index, 4) + ".txt";
}

}  // namespace rosa
