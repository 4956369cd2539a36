// rosa: fuzzing-based backdoor detection from the command line.
//
// Subcommands: run (full two-phase campaign), collect (phase 1 only),
// detect (phase 2 against an existing database), vet (inspect a report),
// bench (bundled benchmark), db-inspect.
//
// Exit codes: 0 success (with or without findings), 1 operational error,
// 2 usage error.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>

#include "rosa/rosa.hpp"

namespace {

using namespace rosa;

std::string default_out_dir() {
  const char* env = std::getenv("ROSA_OUT");
  return env ? env : "";
}

void print_report_summary(std::uint64_t index, const EmittedReport& er) {
  const auto& r = er.report;
  std::printf("report %04llu: input #%llu (%s) edge-dist %zu rep #%llu "
              "diff %s\n",
              static_cast<unsigned long long>(index),
              static_cast<unsigned long long>(r.suspect.id),
              std::string(to_string(r.suspect.origin)).c_str(),
              r.edge_distance,
              static_cast<unsigned long long>(r.matches.front().rep_id),
              canonical_diff(r.matches.front().diff).c_str());
}

int cmd_run(const CampaignConfig& cfg) {
  const CampaignResult result = run_campaign(cfg);
  std::printf("phase 1: %llu execs -> %zu family representatives%s\n",
              static_cast<unsigned long long>(cfg.phase1_execs),
              result.db.size(),
              result.metrics.phase1_contaminated ? " (contaminated)" : "");
  std::printf("phase 2: %llu execs -> %llu raw positives, %llu reports "
              "after deduplication\n",
              static_cast<unsigned long long>(cfg.phase2_execs),
              static_cast<unsigned long long>(
                  result.metrics.raw_decide_positives),
              static_cast<unsigned long long>(
                  result.metrics.emitted_reports));
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    print_report_summary(i, result.reports[i]);
  }
  if (result.metrics.detected) {
    std::printf("ground truth: backdoor detected (first true report after "
                "%llu phase-2 execs, %llu inputs to vet for 95%%)\n",
                static_cast<unsigned long long>(
                    *result.metrics.execs_to_first_true_report),
                static_cast<unsigned long long>(
                    result.metrics.inputs_to_vet_for_95pct.value_or(0)));
  }
  return 0;
}

int cmd_collect(const std::string& target_name, const std::string& seeds,
                std::uint64_t execs, std::uint64_t rng_seed,
                std::uint32_t workers, const std::string& out) {
  const BenchmarkPair* pair = find_target(target_name);
  if (!pair) throw UnknownTargetError(target_name);
  const auto target = pair->make_backdoor();
  std::vector<TestInput> seed_inputs;
  if (seeds.empty()) {
    seed_inputs = make_seed_inputs(pair->default_seeds);
  } else {
    seed_inputs = make_seed_inputs(load_seed_dir(seeds));
  }
  if (seed_inputs.empty()) throw NoSeedsError{};
  Corpus corpus;
  const RepresentativeDb db = collect_database(
      *target, seed_inputs, execs, rng_seed, workers, &corpus);
  fs::create_directories(out);
  save_corpus(fs::path(out) / "corpus_phase1", corpus, target_name);
  save_database(fs::path(out) / "db", db, target_name);
  std::printf("collected %zu family representatives from %llu execs\n",
              db.size(), static_cast<unsigned long long>(execs));
  return 0;
}

int cmd_detect(const std::string& db_dir, const std::string& seeds,
               std::uint64_t execs, std::uint64_t rng_seed,
               std::uint32_t workers, const std::string& out) {
  LoadedDatabase loaded = load_database(db_dir);
  const BenchmarkPair* pair = find_target(loaded.target);
  if (!pair) throw UnknownTargetError(loaded.target);
  const auto target = pair->make_backdoor();
  const auto twin = pair->make_markers ? pair->make_markers() : nullptr;
  std::vector<TestInput> seed_inputs;
  if (seeds.empty()) {
    seed_inputs = make_seed_inputs(pair->default_seeds);
  } else {
    seed_inputs = make_seed_inputs(load_seed_dir(seeds));
  }
  if (seed_inputs.empty()) throw NoSeedsError{};

  CampaignMetrics metrics;
  Corpus corpus;
  const auto reports =
      detect_backdoors(*target, twin.get(), loaded.db, seed_inputs, execs,
                       rng_seed, workers, metrics, &corpus);
  if (!out.empty()) {
    fs::create_directories(out);
    save_corpus(fs::path(out) / "corpus_phase2", corpus, loaded.target);
    const auto reports_dir = fs::path(out) / "reports";
    fs::create_directories(reports_dir);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      StoredReport sr;
      sr.target = loaded.target;
      sr.report = reports[i].report;
      for (const auto& m : sr.report.matches) {
        sr.rep_inputs.push_back(loaded.db.entry(m.rep_id).input.bytes);
      }
      write_file(reports_dir / report_filename(i), encode_report(sr));
    }
    write_file(fs::path(out) / "metrics", encode_metrics(metrics));
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    print_report_summary(i, reports[i]);
  }
  std::printf("%llu raw positives, %zu reports after deduplication\n",
              static_cast<unsigned long long>(metrics.raw_decide_positives),
              reports.size());
  return 0;
}

int cmd_vet(const std::string& report_path, bool replay) {
  const StoredReport stored = decode_report(read_file(report_path));
  std::fputs(render_vet_view(stored).c_str(), stdout);
  if (replay) {
    const ReplayOutcome outcome = replay_report(stored);
    std::fputs(outcome.rendered.c_str(), stdout);
  }
  return 0;
}

int cmd_db_inspect(const std::string& db_dir) {
  const LoadedDatabase loaded = load_database(db_dir);
  std::printf("target: %s\n", loaded.target.c_str());
  std::printf("entries: %zu\n", loaded.db.size());
  for (const auto& e : loaded.db.entries()) {
    std::string classes;
    for (SyscallClass c : e.syscalls.classes()) {
      if (!classes.empty()) classes += ' ';
      classes += to_string(c);
    }
    std::printf("rep %04llu: %zu edges, fingerprint %016llx, syscalls [%s]\n",
                static_cast<unsigned long long>(e.rep_id),
                e.edge_set.size(),
                static_cast<unsigned long long>(fingerprint(e.edge_set)),
                classes.c_str());
  }
  return 0;
}

struct BenchRowStats {
  std::string name;
  std::uint32_t failed = 0;
  std::uint32_t trials = 0;
  std::vector<std::uint64_t> execs_to_first;  // successful trials only
  std::vector<std::uint64_t> inputs_to_vet;   // all trials
};

std::uint64_t median_of(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

int cmd_bench(std::uint32_t trials, std::uint64_t phase1,
              std::uint64_t phase2, std::uint64_t rng_seed,
              const std::string& out) {
  std::vector<BenchRowStats> rows;
  for (const auto& pair : bundled_benchmark()) {
    BenchRowStats row;
    row.name = pair.name;
    row.trials = trials;
    for (std::uint32_t t = 0; t < trials; ++t) {
      CampaignConfig cfg;
      cfg.target_name = pair.name;
      cfg.phase1_execs = phase1;
      cfg.phase2_execs = phase2;
      cfg.rng_seed = rng_seed + t;
      const CampaignResult r = run_campaign(cfg);
      if (r.metrics.detected) {
        row.execs_to_first.push_back(*r.metrics.execs_to_first_true_report);
      } else {
        ++row.failed;
      }
      row.inputs_to_vet.push_back(r.metrics.inputs_to_vet_for_95pct.value_or(
          r.metrics.emitted_reports));
    }
    rows.push_back(std::move(row));
    std::fprintf(stderr, "bench: %s done\n", pair.name.c_str());
  }

  std::printf("%-10s %8s %12s %12s %12s %8s %8s %8s\n", "target", "failed",
              "exec-min", "exec-median", "exec-max", "vet-min", "vet-mean",
              "vet-max");
  std::ostringstream machine;
  machine << "rosa-bench v1\n";
  machine << "trials: " << trials << '\n';
  machine << "phase1_execs: " << phase1 << '\n';
  machine << "phase2_execs: " << phase2 << '\n';
  machine << "rng_seed: " << rng_seed << '\n';
  machine << "targets: " << rows.size() << '\n';
  for (const auto& row : rows) {
    std::string emin = "-", emed = "-", emax = "-";
    if (!row.execs_to_first.empty()) {
      emin = std::to_string(
          *std::min_element(row.execs_to_first.begin(),
                            row.execs_to_first.end()));
      emed = std::to_string(median_of(row.execs_to_first));
      emax = std::to_string(
          *std::max_element(row.execs_to_first.begin(),
                            row.execs_to_first.end()));
    }
    std::uint64_t vmin = 0, vmax = 0;
    double vmean = 0;
    if (!row.inputs_to_vet.empty()) {
      vmin = *std::min_element(row.inputs_to_vet.begin(),
                               row.inputs_to_vet.end());
      vmax = *std::max_element(row.inputs_to_vet.begin(),
                               row.inputs_to_vet.end());
      for (auto v : row.inputs_to_vet) vmean += static_cast<double>(v);
      vmean /= static_cast<double>(row.inputs_to_vet.size());
    }
    std::printf("%-10s %4u/%-3u %12s %12s %12s %8llu %8.1f %8llu\n",
                row.name.c_str(), row.failed, row.trials, emin.c_str(),
                emed.c_str(), emax.c_str(),
                static_cast<unsigned long long>(vmin), vmean,
                static_cast<unsigned long long>(vmax));
    machine << "row: " << row.name << ' ' << row.failed << ' ' << emin << ' '
            << emed << ' ' << emax << ' ' << vmin << ' ' << vmean << ' '
            << vmax << '\n';
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "bench_results.txt", std::move(machine).str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rosa: fuzzing-based code-level backdoor detection"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a full two-phase campaign");
  CampaignConfig cfg;
  std::string run_seeds, run_out = default_out_dir();
  run->add_option("--target", cfg.target_name, "target name")->required();
  run->add_option("--seeds", run_seeds,
                  "seed directory (one raw input per file); defaults to the "
                  "target's bundled seeds");
  run->add_option("--phase1-execs", cfg.phase1_execs,
                  "phase-1 execution budget")->required();
  run->add_option("--phase2-execs", cfg.phase2_execs,
                  "phase-2 execution budget")->required();
  run->add_option("--rng-seed", cfg.rng_seed, "campaign rng seed")
      ->default_val(1);
  run->add_option("--workers", cfg.workers, "parallel fuzzing workers")
      ->default_val(1);
  run->add_option("--out", run_out,
                  "output directory (env ROSA_OUT is the default)");

  // collect
  auto* collect =
      app.add_subcommand("collect", "phase 1 only: build a database");
  std::string col_target, col_seeds, col_out = default_out_dir();
  std::uint64_t col_execs = 0, col_seed = 1;
  std::uint32_t col_workers = 1;
  collect->add_option("--target", col_target, "target name")->required();
  collect->add_option("--seeds", col_seeds, "seed directory");
  collect->add_option("--execs", col_execs, "phase-1 execution budget")
      ->required();
  collect->add_option("--rng-seed", col_seed, "rng seed")->default_val(1);
  collect->add_option("--workers", col_workers, "workers")->default_val(1);
  collect->add_option("--out", col_out, "output directory")->required();

  // detect
  auto* detect = app.add_subcommand(
      "detect", "phase 2 only: fuzz against an existing database");
  std::string det_db, det_seeds, det_out = default_out_dir();
  std::uint64_t det_execs = 0, det_seed = 1;
  std::uint32_t det_workers = 1;
  detect->add_option("--db", det_db, "database directory")->required();
  detect->add_option("--seeds", det_seeds, "seed directory");
  detect->add_option("--execs", det_execs, "phase-2 execution budget")
      ->required();
  detect->add_option("--rng-seed", det_seed, "rng seed")->default_val(1);
  detect->add_option("--workers", det_workers, "workers")->default_val(1);
  detect->add_option("--out", det_out, "output directory");

  // vet
  auto* vet = app.add_subcommand("vet", "render one report for expert "
                                        "vetting");
  std::string vet_path;
  bool vet_replay = false;
  vet->add_option("report", vet_path, "path to a report file")->required();
  vet->add_flag("--replay", vet_replay,
                "re-execute both inputs and check the stored diff");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "run the bundled backdoor benchmark");
  std::uint32_t bench_trials = 10;
  std::uint64_t bench_p1 = 20000, bench_p2 = 200000, bench_seed = 1;
  std::string bench_out = default_out_dir();
  bench->add_option("--trials", bench_trials, "campaigns per target")
      ->default_val(10);
  bench->add_option("--phase1-execs", bench_p1, "phase-1 budget")
      ->default_val(20000);
  bench->add_option("--phase2-execs", bench_p2, "phase-2 budget")
      ->default_val(200000);
  bench->add_option("--rng-seed", bench_seed, "base rng seed")
      ->default_val(1);
  bench->add_option("--out", bench_out, "directory for machine-readable "
                                        "results");

  // db-inspect
  auto* inspect =
      app.add_subcommand("db-inspect", "summarize a database directory");
  std::string ins_db;
  inspect->add_option("--db", ins_db, "database directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      cfg.seeds_dir = run_seeds;
      cfg.out_dir = run_out;
      return cmd_run(cfg);
    }
    if (*collect) {
      return cmd_collect(col_target, col_seeds, col_execs, col_seed,
                         col_workers, col_out);
    }
    if (*detect) {
      return cmd_detect(det_db, det_seeds, det_execs, det_seed, det_workers,
                        det_out);
    }
    if (*vet) return cmd_vet(vet_path, vet_replay);
    if (*bench) {
      return cmd_bench(bench_trials, bench_p1, bench_p2, bench_seed,
                       bench_out);
    }
    if (*inspect) return cmd_db_inspect(ins_db);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
