// Campaign orchestration: phase 1 (representative collection) then
// phase 2 (detection), metrics against the ground-truth marker twin, and
// the phase-1 budget sweep.
//
// Ground-truth isolation: the oracle path works on erased trace views;
// the marker twin is consulted only here, for labeling reports and
// checking database contamination.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rosa/benchmark.hpp"
#include "rosa/fuzzer.hpp"
#include "rosa/oracle.hpp"
#include "rosa/rng.hpp"
#include "rosa/store.hpp"

namespace rosa {

struct UnknownTargetError : std::runtime_error {
  explicit UnknownTargetError(const std::string& name)
      : std::runtime_error("unknown target: " + name) {}
};

struct CampaignConfig {
  std::string target_name;
  std::filesystem::path seeds_dir;  // empty: use the target's default seeds
  std::uint64_t phase1_execs = 0;
  std::uint64_t phase2_execs = 0;
  std::uint64_t rng_seed = 0;
  std::uint32_t workers = 1;
  std::filesystem::path out_dir;  // empty: keep everything in memory
};

struct CampaignMetrics {
  bool detected = false;
  std::optional<std::uint64_t> execs_to_first_true_report;
  std::uint64_t emitted_reports = 0;
  std::uint64_t true_positive_reports = 0;
  std::uint64_t false_positive_reports = 0;
  std::optional<std::uint64_t> inputs_to_vet_for_95pct;
  bool phase1_contaminated = false;
  // Dedup effectiveness: how many raw decide() positives the emitted
  // reports were reduced from.
  std::uint64_t raw_decide_positives = 0;
};

struct EmittedReport {
  BackdoorReport report;
  bool is_true_positive = false;
  std::uint64_t phase2_exec_index = 0;  // 1-based
};

struct CampaignResult {
  RepresentativeDb db;
  std::vector<EmittedReport> reports;
  CampaignMetrics metrics;
};

// Smallest number of reports an expert must draw uniformly at random,
// without replacement, to see at least one true report with probability
// >= 0.95; if no report is true, the whole list must be exhausted.
// Computed exactly on the hypergeometric tail: P(all n draws false) =
// C(N-K, n) / C(N, n) <= 1/20.
inline std::uint64_t vet_count_95(const std::vector<bool>& labels) {
  using boost::multiprecision::cpp_int;
  const std::uint64_t n_total = labels.size();
  std::uint64_t n_true = 0;
  for (bool b : labels) n_true += b ? 1 : 0;
  if (n_true == 0) return n_total;

  auto binomial = [](std::uint64_t n, std::uint64_t k) -> cpp_int {
    if (k > n) return 0;
    cpp_int r = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
      r *= n - i;
      r /= i + 1;
    }
    return r;
  };

  const std::uint64_t n_false = n_total - n_true;
  for (std::uint64_t n = 1; n <= n_total; ++n) {
    if (20 * binomial(n_false, n) <= binomial(n_total, n)) return n;
  }
  return n_total;
}

namespace detail {

inline std::vector<TestInput> resolve_seeds(const CampaignConfig& cfg,
                                            const BenchmarkPair& pair) {
  if (cfg.seeds_dir.empty()) {
    return make_seed_inputs(pair.default_seeds);
  }
  auto blobs = load_seed_dir(cfg.seeds_dir);
  if (blobs.empty()) throw NoSeedsError{};
  return make_seed_inputs(blobs);
}

inline void validate(const CampaignConfig& cfg) {
  if (cfg.phase1_execs < 1 || cfg.phase2_execs < 1) {
    throw std::invalid_argument("phase budgets must be >= 1");
  }
  if (cfg.workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
}

inline bool twin_triggers(const Target& twin, const TestInput& input) {
  return execute(twin, std::span<const std::uint8_t>(input.bytes.data(),
                                                     input.bytes.size()))
      .ground_truth_triggered;
}

}  // namespace detail

// Phase 1 only: fuzz and distill the representative database.
inline RepresentativeDb collect_database(const Target& target,
                                         const std::vector<TestInput>& seeds,
                                         std::uint64_t execs,
                                         std::uint64_t rng_seed,
                                         std::uint32_t workers,
                                         Corpus* corpus_out = nullptr) {
  FuzzOptions opts;
  opts.budget_execs = execs;
  opts.rng_seed = derive_seed(rng_seed, 1);
  opts.workers = workers;
  Corpus corpus = fuzz_loop(target, seeds, opts);
  RepresentativeDb db = build_database(corpus);
  if (corpus_out) *corpus_out = std::move(corpus);
  return db;
}

// Phase 2 only: fuzz against a frozen database, deciding and
// deduplicating on every execution. The marker twin, when present,
// labels emitted reports.
inline std::vector<EmittedReport> detect_backdoors(
    const Target& target, const Target* marker_twin,
    const RepresentativeDb& db, const std::vector<TestInput>& seeds,
    std::uint64_t execs, std::uint64_t rng_seed, std::uint32_t workers,
    CampaignMetrics& metrics, Corpus* corpus_out = nullptr) {
  std::vector<EmittedReport> emitted;
  DedupKeySet seen;
  std::mutex mu;
  std::uint64_t exec_index = 0;

  Observer observer = [&](const TestInput& input,
                          const ExecutionTrace& trace) {
    const TraceView view = erase_ground_truth(trace);
    auto report = decide(input, view, db);
    if (!report) {
      std::lock_guard lock(mu);
      ++exec_index;
      return;
    }
    std::lock_guard lock(mu);
    ++exec_index;
    ++metrics.raw_decide_positives;
    if (!deduplicate(*report, seen)) return;
    EmittedReport er;
    er.phase2_exec_index = exec_index;
    er.is_true_positive =
        marker_twin && detail::twin_triggers(*marker_twin, input);
    er.report = std::move(*report);
    emitted.push_back(std::move(er));
  };

  FuzzOptions opts;
  opts.budget_execs = execs;
  opts.rng_seed = derive_seed(rng_seed, 2);
  opts.workers = workers;
  Corpus corpus = fuzz_loop(target, seeds, opts, observer);
  if (corpus_out) *corpus_out = std::move(corpus);

  metrics.emitted_reports = emitted.size();
  for (const auto& er : emitted) {
    if (er.is_true_positive) {
      ++metrics.true_positive_reports;
      if (!metrics.execs_to_first_true_report) {
        metrics.execs_to_first_true_report = er.phase2_exec_index;
      }
    } else {
      ++metrics.false_positive_reports;
    }
  }
  metrics.detected = metrics.true_positive_reports >= 1;
  if (marker_twin) {
    std::vector<bool> labels;
    labels.reserve(emitted.size());
    for (const auto& er : emitted) labels.push_back(er.is_true_positive);
    metrics.inputs_to_vet_for_95pct = vet_count_95(labels);
  }
  return emitted;
}

inline std::string encode_metrics(const CampaignMetrics& m) {
  std::ostringstream out;
  auto opt = [](const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  out << "rosa-metrics v1\n";
  out << "detected: " << (m.detected ? 1 : 0) << '\n';
  out << "execs_to_first_true_report: " << opt(m.execs_to_first_true_report)
      << '\n';
  out << "emitted_reports: " << m.emitted_reports << '\n';
  out << "true_positive_reports: " << m.true_positive_reports << '\n';
  out << "false_positive_reports: " << m.false_positive_reports << '\n';
  out << "inputs_to_vet_for_95pct: " << opt(m.inputs_to_vet_for_95pct)
      << '\n';
  out << "phase1_contaminated: " << (m.phase1_contaminated ? 1 : 0) << '\n';
  out << "raw_decide_positives: " << m.raw_decide_positives << '\n';
  return std::move(out).str();
}

inline std::string encode_config(const CampaignConfig& cfg) {
  std::ostringstream out;
  out << "rosa-config v1\n";
  out << "target: " << cfg.target_name << '\n';
  out << "seeds_dir: "
      << (cfg.seeds_dir.empty() ? std::string("-") : cfg.seeds_dir.string())
      << '\n';
  out << "phase1_execs: " << cfg.phase1_execs << '\n';
  out << "phase2_execs: " << cfg.phase2_execs << '\n';
  out << "rng_seed: " << cfg.rng_seed << '\n';
  out << "workers: " << cfg.workers << '\n';
  out << "out_dir: "
      << (cfg.out_dir.empty() ? std::string("-") : cfg.out_dir.string())
      << '\n';
  return std::move(out).str();
}

// The full pipeline: phase 1, database, phase 2 with the oracle, metrics
// against the marker twin, and (when out_dir is set) the persisted
// artifact layout: db/, reports/, corpus_phase1/, corpus_phase2/,
// metrics, config.
inline CampaignResult run_campaign(const CampaignConfig& cfg) {
  detail::validate(cfg);
  const BenchmarkPair* pair = find_target(cfg.target_name);
  if (!pair) throw UnknownTargetError(cfg.target_name);
  const auto target = pair->make_backdoor();
  const auto twin = pair->make_markers ? pair->make_markers() : nullptr;
  const std::vector<TestInput> seeds = detail::resolve_seeds(cfg, *pair);

  CampaignResult result;
  Corpus corpus1;
  result.db = collect_database(*target, seeds, cfg.phase1_execs,
                               cfg.rng_seed, cfg.workers, &corpus1);

  if (twin) {
    for (const auto& e : result.db.entries()) {
      if (detail::twin_triggers(*twin, e.input)) {
        result.metrics.phase1_contaminated = true;
        break;
      }
    }
  }

  Corpus corpus2;
  result.reports = detect_backdoors(*target, twin.get(), result.db, seeds,
                                    cfg.phase2_execs, cfg.rng_seed,
                                    cfg.workers, result.metrics, &corpus2);

  if (!cfg.out_dir.empty()) {
    const auto& out = cfg.out_dir;
    fs::create_directories(out);
    save_corpus(out / "corpus_phase1", corpus1, cfg.target_name);
    save_corpus(out / "corpus_phase2", corpus2, cfg.target_name);
    save_database(out / "db", result.db, cfg.target_name);
    const auto reports_dir = out / "reports";
    fs::create_directories(reports_dir);
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
      StoredReport sr;
      sr.target = cfg.target_name;
      sr.report = result.reports[i].report;
      for (const auto& m : sr.report.matches) {
        sr.rep_inputs.push_back(result.db.entry(m.rep_id).input.bytes);
      }
      write_file(reports_dir / report_filename(i), encode_report(sr));
    }
    write_file(out / "metrics", encode_metrics(result.metrics));
    write_file(out / "config", encode_config(cfg));
  }
  return result;
}

// --- phase-1 budget sweep -----------------------------------------------------

struct SweepRow {
  std::uint64_t phase1_budget = 0;
  double mean_inputs_to_vet = 0.0;
  std::uint32_t failed_trials = 0;
  std::uint32_t trials = 0;
};

// Runs `trials` independent campaigns per budget (rng seeds = base seed
// + trial index) and aggregates the vetting effort and failure series.
inline std::vector<SweepRow> sweep_phase1(const CampaignConfig& base,
                                          std::span<const std::uint64_t> budgets,
                                          std::uint32_t trials) {
  if (budgets.empty()) throw std::invalid_argument("no budgets given");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<SweepRow> rows;
  rows.reserve(budgets.size());
  for (const std::uint64_t budget : budgets) {
    SweepRow row;
    row.phase1_budget = budget;
    row.trials = trials;
    double vet_sum = 0.0;
    for (std::uint32_t t = 0; t < trials; ++t) {
      CampaignConfig cfg = base;
      cfg.phase1_execs = budget;
      cfg.rng_seed = base.rng_seed + t;
      cfg.out_dir.clear();
      const CampaignResult r = run_campaign(cfg);
      if (!r.metrics.detected) ++row.failed_trials;
      vet_sum += static_cast<double>(
          r.metrics.inputs_to_vet_for_95pct.value_or(r.metrics.emitted_reports));
    }
    row.mean_inputs_to_vet = vet_sum / trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rosa
