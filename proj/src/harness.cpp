#include "levysep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "levysep/decompose.hpp"

namespace levysep {

namespace {

constexpr std::size_t kMaxInvariantMessages = 8;

void note(InvariantTally& tally, const InvariantReport& report, const std::string& context) {
  ++tally.checked;
  if (report.ok) return;
  ++tally.violations;
  for (const auto& v : report.violations) {
    if (tally.messages.size() < kMaxInvariantMessages) tally.messages.push_back(context + ": " + v);
  }
}

void merge(InvariantTally& into, const InvariantTally& from) {
  into.checked += from.checked;
  into.violations += from.violations;
  for (const auto& m : from.messages) {
    if (into.messages.size() < kMaxInvariantMessages) into.messages.push_back(m);
  }
}

struct FineSample {
  CompositeSample composite;
  IncrementSeq wPrime;
  std::uint64_t checksum;
};

FineSample simulate_fine(const ExperimentConfig& config, std::uint64_t rep) {
  CompositeSample sample = simulate_composite(config.composite, config.fineLevel, config.masterSeed, rep);
  IncrementSeq wPrime = increments_of(sample.w);
  if (!config.coupleWPrimeToW) {
    RngStream stream(config.masterSeed, derive_stream_id(rep, Component::Independent));
    wPrime = sample_gaussian_increments(config.fineLevel, stream);
  }
  const std::uint64_t checksum = path_checksum(sample.x);
  return {std::move(sample), std::move(wPrime), checksum};
}

ReorderResult reorder_at_level(const FineSample& fine, std::size_t n, bool verify, InvariantTally& tally) {
  const IncrementSeq x = coarsen(fine.composite.xIncrements, n);
  const IncrementSeq wPrime = coarsen(fine.wPrime, n);
  ReorderResult result = reorder_decompose(x, wPrime);
  if (verify) {
    const std::string ctx = "reorder n=" + std::to_string(n);
    note(tally, verify_reorder(x, wPrime, result), ctx);
    note(tally, verify_bridge(bridge_of(result.wApprox)), ctx + " bridge");
  }
  return result;
}

ThresholdResult threshold_at_level(const FineSample& fine, std::size_t n, double sigma, double a_n, bool verify,
                                   InvariantTally& tally) {
  const IncrementSeq x = coarsen(fine.composite.xIncrements, n);
  ThresholdResult result = threshold_decompose(x, sigma, a_n);
  if (verify) {
    const std::string ctx = "threshold n=" + std::to_string(n);
    note(tally, verify_threshold(x, sigma, result), ctx);
    note(tally, verify_bridge(bridge_of(result.wApprox)), ctx + " bridge");
  }
  return result;
}

using ReplicationFn = std::function<std::vector<ErrorSample>(std::uint64_t, InvariantTally&)>;

ExperimentReport run_replications(const ExperimentConfig& config, const std::string& label, const RunHooks& hooks,
                                  const ReplicationFn& fn) {
  const std::size_t reps = config.replications;
  std::vector<std::vector<ErrorSample>> results(reps);
  std::vector<InvariantTally> tallies(reps);
  std::vector<char> done(reps, 0);
  std::atomic<std::size_t> next{0};
  std::mutex emitMutex;
  std::size_t nextToEmit = 0;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps || failed.load()) return;
      const bool skipped = hooks.skipReplications.count(rep) > 0;
      try {
        if (!skipped) results[rep] = fn(rep, tallies[rep]);
      } catch (...) {
        std::lock_guard lock(emitMutex);
        if (!failure) failure = std::current_exception();
        failed = true;
        return;
      }
      std::lock_guard lock(emitMutex);
      done[rep] = 1;
      while (nextToEmit < reps && done[nextToEmit]) {
        const bool wasSkipped = hooks.skipReplications.count(nextToEmit) > 0;
        if (hooks.onReplication && !wasSkipped) hooks.onReplication(label, results[nextToEmit]);
        ++nextToEmit;
      }
    }
  };

  const std::size_t threads = resolve_threads(config.threads, reps);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.label = label;
  report.config = config;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    report.records.insert(report.records.end(), results[rep].begin(), results[rep].end());
    merge(report.invariants, tallies[rep]);
  }
  if (!report.records.empty()) report.summary = summarize(report.records);
  return report;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

ErrorSample make_sample(const ExperimentConfig& config, const FineSample& fine, std::size_t level,
                        std::uint64_t rep, double value) {
  ErrorSample s;
  s.level = level;
  s.fineLevel = config.fineLevel;
  s.value = value;
  s.replication = rep;
  s.seed = config.masterSeed;
  s.pathChecksum = fine.checksum;
  return s;
}

enum class ErrorGrid { Fine, Skeleton };

// Table-style replication; `transform` maps (level, sup bridge error) to the recorded value.
ExperimentReport run_bridge_error(const ExperimentConfig& config, const std::string& label, const RunHooks& hooks,
                                  const std::function<double(std::size_t, double)>& transform,
                                  ErrorGrid grid = ErrorGrid::Fine) {
  return run_replications(config, label, hooks, [&](std::uint64_t rep, InvariantTally& tally) {
    const FineSample fine = simulate_fine(config, rep);
    std::vector<ErrorSample> out;
    for (std::size_t n : config.levels) {
      std::optional<GridPath> skeleton;
      const GridPath& w = grid == ErrorGrid::Skeleton ? skeleton.emplace(coarsen(fine.composite.w, n)) : fine.composite.w;
      double error = 0.0;
      if (config.method == Method::ReorderI) {
        error = n == 1 ? sup_bridge_error(fine.composite.w, path_of(fine.wPrime))
                       : sup_bridge_error(w, reorder_at_level(fine, n, config.verifyInvariants, tally).wApprox);
      } else {
        const double a_n = config.threshold.at(n);
        error = sup_bridge_error(
            w, threshold_at_level(fine, n, config.composite.sigma, a_n, config.verifyInvariants, tally).wApprox);
      }
      out.push_back(make_sample(config, fine, n, rep, transform(n, error)));
    }
    return out;
  });
}

}  // namespace

double ThresholdRule::at(std::size_t n) const {
  switch (kind) {
    case Kind::Default:
      return default_threshold(static_cast<double>(n));
    case Kind::Fixed:
      return value;
    case Kind::Schedule: {
      const double level = static_cast<double>(n);
      double a = coef * std::pow(level, nExponent);
      if (logExponent != 0.0) {
        require(n >= 2, "threshold schedule with a log factor needs n >= 2");
        a *= std::pow(std::log(level), logExponent);
      }
      return a;
    }
  }
  return 0.0;
}

void validate(const ExperimentConfig& config) {
  validate(config.composite);
  require(config.fineLevel >= 1, "fineLevel must be positive");
  require(config.replications >= 1, "replications must be >= 1");
  require(!config.levels.empty(), "levels must not be empty");
  for (std::size_t n : config.levels) {
    require(n >= 1, "levels must be positive");
    require(config.fineLevel % n == 0,
            "level " + std::to_string(n) + " does not divide fineLevel " + std::to_string(config.fineLevel));
  }
  const auto minLevel = *std::min_element(config.levels.begin(), config.levels.end());
  const bool thresholdMethod = config.method == Method::ThresholdII || config.experiment == ExperimentKind::Comparison;
  if (thresholdMethod) {
    require(config.composite.sigma > 0.0, "Method II needs sigma > 0");
    if (config.threshold.kind == ThresholdRule::Kind::Fixed) {
      require(config.threshold.value > 0.0, "fixed threshold must be positive");
    } else {
      require(minLevel >= 2, "Method II with a level-dependent threshold needs levels >= 2");
      require(config.threshold.kind != ThresholdRule::Kind::Schedule || config.threshold.coef > 0.0,
              "threshold schedule coefficient must be positive");
    }
  }
  switch (config.experiment) {
    case ExperimentKind::Table:
    case ExperimentKind::Comparison:
      break;
    case ExperimentKind::CppLimit:
      require(std::holds_alternative<CompoundPoisson>(config.composite.signal),
              "cpp_limit experiment needs a CompoundPoisson signal");
      require(config.composite.sigma > 0.0, "cpp_limit experiment needs sigma > 0");
      require(config.method == Method::ReorderI, "cpp_limit experiment uses Method I");
      require(minLevel >= 3, "cpp_limit experiment needs levels >= 3");
      break;
    case ExperimentKind::NoSigma:
      require(config.composite.sigma == 0.0, "nosigma experiment needs sigma = 0");
      require(config.method == Method::ReorderI, "nosigma experiment uses Method I");
      if (const auto* s = std::get_if<Stable>(&config.composite.signal)) {
        require(s->alpha < 2.0, "nosigma experiment needs a stable index below 2");
      }
      break;
    case ExperimentKind::BrownianRate:
      require(std::holds_alternative<Zero>(config.composite.signal), "brownian_rate check needs Y = Zero");
      require(config.composite.sigma == 1.0, "brownian_rate check needs sigma = 1");
      require(config.method == Method::ReorderI, "brownian_rate check uses Method I");
      require(minLevel >= 16, "brownian_rate check needs levels >= 16 so that log log n > 0");
      break;
  }
}

std::string effective_label(const ExperimentConfig& config) {
  return config.label.empty() ? model_label(config.composite.signal) : config.label;
}

std::vector<SummaryRow> summarize(std::span<const ErrorSample> records) {
  if (records.empty()) throw std::invalid_argument("summarize needs at least one record");
  std::vector<std::size_t> order;
  std::vector<std::vector<double>> values;
  for (const auto& r : records) {
    auto it = std::find(order.begin(), order.end(), r.level);
    if (it == order.end()) {
      order.push_back(r.level);
      values.emplace_back();
      it = order.end() - 1;
    }
    values[static_cast<std::size_t>(it - order.begin())].push_back(r.value);
  }
  std::vector<SummaryRow> rows;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& v = values[k];
    const double count = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= count;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    rows.push_back({order[k], mean, sd, v.size()});
  }
  return rows;
}

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t threads = requested;
  if (threads == 0) {
    if (const char* env = std::getenv("LEVYSEP_THREADS")) {
      char* end = nullptr;
      const long parsed = std::strtol(env, &end, 10);
      if (end != env && parsed > 0) threads = static_cast<std::size_t>(parsed);
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(threads, work));
}

ExperimentReport run_table_experiment(const ExperimentConfig& config, const RunHooks& hooks) {
  validate(config);
  return run_bridge_error(config, effective_label(config), hooks, [](std::size_t, double e) { return e; });
}

PairedReport run_method_comparison(const ExperimentConfig& config, const RunHooks& hooks) {
  ExperimentConfig base = config;
  base.experiment = ExperimentKind::Comparison;
  validate(base);
  base.experiment = ExperimentKind::Table;
  const std::string label = effective_label(config);

  ExperimentConfig first = base;
  first.method = Method::ReorderI;
  ExperimentConfig second = base;
  second.method = Method::ThresholdII;

  PairedReport paired;
  const auto identity = [](std::size_t, double e) { return e; };
  paired.reorder = run_bridge_error(first, label + "/ReorderI", hooks, identity, ErrorGrid::Skeleton);
  paired.threshold = run_bridge_error(second, label + "/ThresholdII", hooks, identity, ErrorGrid::Skeleton);
  paired.reorder.config.experiment = ExperimentKind::Comparison;
  paired.threshold.config.experiment = ExperimentKind::Comparison;

  const auto& a = paired.reorder.records;
  const auto& b = paired.threshold.records;
  paired.pathsIdentical = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
                            return x.replication == y.replication && x.pathChecksum == y.pathChecksum;
                          });
  return paired;
}

ExperimentReport run_cpp_limit_experiment(const ExperimentConfig& config, const RunHooks& hooks) {
  validate(config);
  return run_replications(config, effective_label(config), hooks, [&](std::uint64_t rep, InvariantTally& tally) {
    const FineSample fine = simulate_fine(config, rep);
    const JumpRecord& jumps = *fine.composite.jumps;
    std::vector<ErrorSample> out;
    for (std::size_t n : config.levels) {
      const ReorderResult r = reorder_at_level(fine, n, config.verifyInvariants, tally);
      const double distance = sup_distance(scaled_cpp_error(fine.composite.w, r.wApprox), cpp_limit_process(jumps, n));
      out.push_back(make_sample(config, fine, n, rep, distance));
    }
    return out;
  });
}

ExperimentReport run_cpp_limit_experiment(double rate, std::vector<std::size_t> levels, std::size_t fineLevel,
                                          std::size_t reps, std::uint64_t seed, double jumpSize) {
  ExperimentConfig config;
  config.experiment = ExperimentKind::CppLimit;
  config.composite = {1.0, BrownianLaw::Bessel3, CompoundPoisson{rate, FixedSign{jumpSize}}};
  config.levels = std::move(levels);
  config.fineLevel = fineLevel;
  config.replications = reps;
  config.masterSeed = seed;
  return run_cpp_limit_experiment(config);
}

ExperimentReport run_nosigma_experiment(const ExperimentConfig& config, const RunHooks& hooks) {
  validate(config);
  return run_replications(config, effective_label(config), hooks, [&](std::uint64_t rep, InvariantTally& tally) {
    const FineSample fine = simulate_fine(config, rep);
    std::vector<ErrorSample> out;
    for (std::size_t n : config.levels) {
      const ReorderResult r = reorder_at_level(fine, n, config.verifyInvariants, tally);
      const IncrementSeq x = coarsen(fine.composite.xIncrements, n);
      out.push_back(make_sample(config, fine, n, rep, std::abs(cross_variation(x, r.increments))));
    }
    return out;
  });
}

ExperimentReport run_nosigma_experiment(double stableAlpha, std::vector<std::size_t> levels, std::size_t reps,
                                        std::uint64_t seed) {
  ExperimentConfig config;
  config.experiment = ExperimentKind::NoSigma;
  config.composite = {0.0, BrownianLaw::BrownianStd, Stable{stableAlpha, 0.5, 1.0}};
  require(!levels.empty(), "levels must not be empty");
  config.fineLevel = *std::max_element(levels.begin(), levels.end());
  config.levels = std::move(levels);
  config.replications = reps;
  config.masterSeed = seed;
  return run_nosigma_experiment(config);
}

ExperimentReport run_brownian_rate_check(const ExperimentConfig& config, const RunHooks& hooks) {
  validate(config);
  return run_bridge_error(config, effective_label(config), hooks, [](std::size_t n, double e) {
    const double level = static_cast<double>(n);
    return e * std::sqrt(level / std::log(std::log(level)));
  });
}

ExperimentReport run_brownian_rate_check(std::vector<std::size_t> levels, std::size_t fineLevel, std::size_t reps,
                                         std::uint64_t seed) {
  ExperimentConfig config;
  config.experiment = ExperimentKind::BrownianRate;
  config.composite = {1.0, BrownianLaw::BrownianStd, Zero{}};
  config.levels = std::move(levels);
  config.fineLevel = fineLevel;
  config.replications = reps;
  config.masterSeed = seed;
  return run_brownian_rate_check(config);
}

std::vector<ExperimentReport> run_experiment(const ExperimentConfig& config, const RunHooks& hooks) {
  switch (config.experiment) {
    case ExperimentKind::Table:
      return {run_table_experiment(config, hooks)};
    case ExperimentKind::Comparison: {
      require(hooks.skipReplications.empty(), "resuming a comparison experiment is not supported");
      auto paired = run_method_comparison(config, hooks);
      if (!paired.pathsIdentical) throw std::runtime_error("comparison runs did not share their observed paths");
      return {std::move(paired.reorder), std::move(paired.threshold)};
    }
    case ExperimentKind::CppLimit:
      return {run_cpp_limit_experiment(config, hooks)};
    case ExperimentKind::NoSigma:
      return {run_nosigma_experiment(config, hooks)};
    case ExperimentKind::BrownianRate:
      return {run_brownian_rate_check(config, hooks)};
  }
  return {};
}

}  // namespace levysep
