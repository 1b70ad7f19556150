#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "levysep/metrics.hpp"
#include "levysep/sim.hpp"

namespace levysep {

inline constexpr const char* kSoftwareVersion = "levysep 0.1.0";

enum class Method { ReorderI, ThresholdII };

/// Threshold a_n as a function of the level n.
struct ThresholdRule {
  enum class Kind { Default, Fixed, Schedule };
  Kind kind = Kind::Default;
  double value = 0.0;  // Fixed
  // Schedule: coef * n^nExponent * (log n)^logExponent
  double coef = 1.0;
  double nExponent = -0.5;
  double logExponent = 1.0;

  static ThresholdRule fixed(double v) { return {Kind::Fixed, v}; }
  static ThresholdRule schedule(double coef, double nExponent, double logExponent) {
    return {Kind::Schedule, 0.0, coef, nExponent, logExponent};
  }

  double at(std::size_t n) const;
};

/// Named experiments runnable from a config file.
enum class ExperimentKind { Table, Comparison, CppLimit, NoSigma, BrownianRate };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Table;
  std::string label;  // alpha_or_model column; derived from the signal when empty
  CompositeSpec composite;
  std::vector<std::size_t> levels;
  std::size_t fineLevel = 0;
  std::size_t replications = 1;
  std::uint64_t masterSeed = 0;
  Method method = Method::ReorderI;
  ThresholdRule threshold;
  bool verifyInvariants = true;
  std::size_t threads = 0;  // 0: LEVYSEP_THREADS, else hardware concurrency
  bool coupleWPrimeToW = false;  // test hook: use W itself as W'
};

/// Throws std::invalid_argument for any broken config invariant.
void validate(const ExperimentConfig& config);

std::string effective_label(const ExperimentConfig& config);

struct SummaryRow {
  std::size_t level = 0;
  double mean = 0.0;
  double std = 0.0;  // sample std, divisor count - 1; 0 when count == 1
  std::size_t count = 0;
  bool singleton() const { return count == 1; }
};

struct InvariantTally {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> messages;  // first few only
};

struct ExperimentReport {
  std::string label;
  std::vector<ErrorSample> records;  // ordered by replication, then level
  std::vector<SummaryRow> summary;   // ordered by level as configured
  ExperimentConfig config;
  std::string softwareVersion = kSoftwareVersion;
  InvariantTally invariants;
};

struct PairedReport {
  ExperimentReport reorder;
  ExperimentReport threshold;
  bool pathsIdentical = false;  // per-replication X checksums agree across methods
};

struct RunHooks {
  /// Called once per finished replication, in replication order, with the report label.
  std::function<void(const std::string&, std::span<const ErrorSample>)> onReplication;
  /// Replications already on disk; they are not recomputed.
  std::set<std::uint64_t> skipReplications;
};

/// mean, sample std and count per level, levels in first-seen order.
std::vector<SummaryRow> summarize(std::span<const ErrorSample> records);

/// Worker count: explicit request, else LEVYSEP_THREADS, else hardware concurrency; never above `work`.
std::size_t resolve_threads(std::size_t requested, std::size_t work);

/// Simulates X, W and one W' at the fine level per replication and records the
/// sup bridge error of each level's decomposition against the fine W.
/// Level 1 under Method I compares against the fine W' bridge itself.
ExperimentReport run_table_experiment(const ExperimentConfig& config, const RunHooks& hooks = {});

/// Both methods on identical paths; config.method is ignored. Errors are taken
/// on the level-n skeleton of W rather than on the fine grid. Labels get the
/// suffixes "/ReorderI" and "/ThresholdII".
PairedReport run_method_comparison(const ExperimentConfig& config, const RunHooks& hooks = {});

/// Sup distance between the scaled Method I error and its compound Poisson limit.
ExperimentReport run_cpp_limit_experiment(const ExperimentConfig& config, const RunHooks& hooks = {});
ExperimentReport run_cpp_limit_experiment(double rate, std::vector<std::size_t> levels, std::size_t fineLevel,
                                          std::size_t reps, std::uint64_t seed, double jumpSize = 1.0);

/// |sum_i dX_i dW^(n)_i| with sigma = 0.
ExperimentReport run_nosigma_experiment(const ExperimentConfig& config, const RunHooks& hooks = {});
ExperimentReport run_nosigma_experiment(double stableAlpha, std::vector<std::size_t> levels, std::size_t reps,
                                        std::uint64_t seed);

/// sup bridge error * sqrt(n / log log n) for Y = 0, sigma = 1.
ExperimentReport run_brownian_rate_check(const ExperimentConfig& config, const RunHooks& hooks = {});
ExperimentReport run_brownian_rate_check(std::vector<std::size_t> levels, std::size_t fineLevel, std::size_t reps,
                                         std::uint64_t seed);

/// Dispatches on config.experiment. Comparison yields two reports (Method I, Method II),
/// every other experiment one. Resuming a comparison is not supported.
std::vector<ExperimentReport> run_experiment(const ExperimentConfig& config, const RunHooks& hooks = {});

}  // namespace levysep
