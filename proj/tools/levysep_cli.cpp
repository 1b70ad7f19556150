#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levysep/decompose.hpp"
#include "levysep/harness.hpp"
#include "levysep/metrics.hpp"
#include "levysep/report_io.hpp"
#include "levysep/sim.hpp"

using namespace levysep;
using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::binary | mode);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

json read_json(const std::string& path) {
  auto in = open_in(path);
  return json::parse(in);
}

// Writes to `path`, or stdout when the path is "-" or empty.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
  } else {
    auto out = open_out(path);
    fn(out);
  }
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string spec;
  std::string out;
  std::string jumps;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

void run_simulate(const SimulateArgs& a) {
  CompositeSpec spec;
  if (!a.spec.empty()) spec = composite_spec_from_json(read_json(a.spec));
  const CompositeSample s = simulate_composite(spec, a.n, a.seed, a.replication);
  Table t;
  t.columns = {"t", "x", "w", "y"};
  t.data.resize(4);
  for (std::size_t i = 0; i <= a.n; ++i) {
    t.data[0].push_back(static_cast<double>(i) / static_cast<double>(a.n));
    t.data[1].push_back(s.x[i]);
    t.data[2].push_back(s.w[i]);
    t.data[3].push_back(s.y[i]);
  }
  emit(a.out, [&](std::ostream& out) { write_table_csv(out, t); });
  if (!a.jumps.empty()) {
    if (!s.jumps) throw std::invalid_argument("--jumps needs a CompoundPoisson signal");
    Table j{{"time", "size"}, {s.jumps->times, s.jumps->sizes}};
    emit(a.jumps, [&](std::ostream& out) { write_table_csv(out, j); });
  }
}

// --- decompose --------------------------------------------------------------

struct DecomposeArgs {
  std::string in;
  std::string out;
  std::string column = "x";
  std::string method = "ReorderI";
  double sigma = 1.0;
  std::optional<double> threshold;
  std::uint64_t seed = 0;
  std::optional<std::size_t> level;
  std::string jumps;
};

void run_decompose(const DecomposeArgs& a) {
  auto in = open_in(a.in);
  const Table t = read_table_csv(in);
  const GridPath fineX(t.column(a.column));
  const std::size_t n = a.level ? *a.level : fineX.n();
  const IncrementSeq x = increments_of(coarsen(fineX, n));
  const bool hasW = std::find(t.columns.begin(), t.columns.end(), "w") != t.columns.end();

  GridPath approx = GridPath::zero(n);
  if (a.method == "ReorderI") {
    RngStream stream(a.seed, derive_stream_id(0, Component::Independent));
    approx = reorder_decompose(x, sample_gaussian_increments(n, stream)).wApprox;
  } else if (a.method == "ThresholdII") {
    const double a_n = a.threshold ? *a.threshold : default_threshold(static_cast<double>(n));
    approx = threshold_decompose(x, a.sigma, a_n).wApprox;
  } else {
    throw std::invalid_argument("unknown method '" + a.method + "'");
  }
  const GridPath bridge = bridge_of(approx);

  Table res;
  res.columns = {"t", "w_approx", "bridge"};
  res.data.resize(3);
  for (std::size_t i = 0; i <= n; ++i) {
    res.data[0].push_back(static_cast<double>(i) / static_cast<double>(n));
    res.data[1].push_back(approx[i]);
    res.data[2].push_back(bridge[i]);
  }
  // With the true W at hand, add its bridge on the same grid and the compound Poisson overlay.
  if (hasW) {
    const GridPath w(t.column("w"));
    const GridPath wBridge = bridge_of(coarsen(w, n));
    res.columns.push_back("w_bridge");
    res.data.emplace_back(wBridge.values().begin(), wBridge.values().end());
    if (!a.jumps.empty()) {
      auto jin = open_in(a.jumps);
      const Table jt = read_table_csv(jin);
      const JumpRecord jumps{jt.column("time"), jt.column("size")};
      const GridPath scaled = scaled_cpp_error(w, approx);
      const GridPath limit = cpp_limit_process(jumps, n);
      res.columns.insert(res.columns.end(), {"scaled_error", "cpp_limit"});
      res.data.emplace_back(scaled.values().begin(), scaled.values().end());
      res.data.emplace_back(limit.values().begin(), limit.values().end());
    }
  } else if (!a.jumps.empty()) {
    throw std::invalid_argument("--jumps needs a 'w' column in the input");
  }
  emit(a.out, [&](std::ostream& out) { write_table_csv(out, res); });
}

// --- experiment -------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string raw;
  std::string summary;
  std::string reportJson;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool resume = false;
};

// Replications in an existing raw file that carry a record for every level.
std::vector<LabeledSample> complete_rows(const std::string& path, const ExperimentConfig& config,
                                         std::set<std::uint64_t>& complete) {
  std::ifstream file(path, std::ios::binary);
  if (!file) return {};
  std::string text{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
  // An interrupted run can leave a torn last line.
  if (!text.empty() && text.back() != '\n') text.erase(text.rfind('\n') + 1);
  std::istringstream in(text);
  const auto rows = read_raw_csv(in);
  const std::string label = effective_label(config);
  std::map<std::uint64_t, std::set<std::size_t>> levelsSeen;
  for (const auto& r : rows) {
    if (r.label != label || r.sample.seed != config.masterSeed || r.sample.fineLevel != config.fineLevel) {
      throw std::runtime_error("raw file '" + path + "' belongs to a different experiment; refusing to resume");
    }
    levelsSeen[r.sample.replication].insert(r.sample.level);
  }
  const std::set<std::size_t> wanted(config.levels.begin(), config.levels.end());
  for (const auto& [rep, seen] : levelsSeen) {
    if (seen == wanted && rep < config.replications) complete.insert(rep);
  }
  std::vector<LabeledSample> kept;
  for (const auto& r : rows) {
    if (complete.count(r.sample.replication)) kept.push_back(r);
  }
  return kept;
}

void run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentConfig config = config_from_json(read_json(a.config));
  if (a.seed) config.masterSeed = *a.seed;
  if (a.threads) config.threads = *a.threads;
  validate(config);
  if (a.resume && config.experiment == ExperimentKind::Comparison) {
    throw std::invalid_argument("--resume is not supported for comparison experiments");
  }
  if (a.resume && a.raw.empty()) throw std::invalid_argument("--resume needs --raw");

  RunHooks hooks;
  std::vector<LabeledSample> previous;
  if (a.resume) previous = complete_rows(a.raw, config, hooks.skipReplications);

  std::ofstream raw;
  if (!a.raw.empty()) {
    raw = open_out(a.raw);
    write_raw_header(raw);
    for (const auto& r : previous) write_raw_rows(raw, r.label, std::span(&r.sample, 1));
    raw.flush();
    hooks.onReplication = [&](const std::string& label, std::span<const ErrorSample> records) {
      write_raw_rows(raw, label, records);
      raw.flush();
    };
  }

  std::vector<ExperimentReport> reports = run_experiment(config, hooks);

  if (!previous.empty()) {
    // Fold the resumed rows back in, replication order first.
    auto& report = reports.front();
    std::vector<ErrorSample> merged;
    for (const auto& r : previous) merged.push_back(r.sample);
    merged.insert(merged.end(), report.records.begin(), report.records.end());
    std::stable_sort(merged.begin(), merged.end(),
                     [](const ErrorSample& x, const ErrorSample& y) { return x.replication < y.replication; });
    report.records = std::move(merged);
    report.summary = summarize(report.records);
  }

  std::uint64_t violations = 0;
  for (const auto& r : reports) violations += r.invariants.violations;

  if (!a.summary.empty()) {
    emit(a.summary, [&](std::ostream& out) {
      out << kSummaryHeader << '\n';
      for (const auto& r : reports) write_summary_rows(out, r.label, r.summary);
    });
  }
  json doc = json::array();
  for (const auto& r : reports) doc.push_back(report_to_json(r));
  if (!a.reportJson.empty()) {
    emit(a.reportJson, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
  }
  if (a.summary.empty() && a.reportJson.empty()) {
    std::cout << kSummaryHeader << '\n';
    for (const auto& r : reports) write_summary_rows(std::cout, r.label, r.summary);
  }
  if (violations > 0) throw std::runtime_error("invariant violations: " + std::to_string(violations));
}

// --- rate-fit ---------------------------------------------------------------

struct RateFitArgs {
  std::string summary;
  std::string out;
  std::size_t minLevel = 0;
};

void run_rate_fit(const RateFitArgs& a) {
  auto in = open_in(a.summary);
  const auto rows = read_summary_csv(in);
  std::vector<std::string> order;
  std::map<std::string, std::vector<LevelMean>> byLabel;
  for (const auto& r : rows) {
    if (r.row.level < a.minLevel) continue;
    if (!byLabel.count(r.label)) order.push_back(r.label);
    byLabel[r.label].push_back({static_cast<double>(r.row.level), r.row.mean});
  }
  if (order.empty()) throw std::runtime_error("no summary rows to fit");
  json doc = json::object();
  for (const auto& label : order) {
    const RateFit fit = fit_rate(byLabel[label]);
    doc[label] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"rSquared", fit.rSquared},
                  {"levels", byLabel[label].size()}};
  }
  emit(a.out, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path decomposition of Levy processes: simulation, decomposition and error experiments"};
  app.set_version_flag("--version", kSoftwareVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simCmd = app.add_subcommand("simulate", "Simulate X = Y + sigma W and write t,x,w,y as CSV");
  simCmd->add_option("--spec", sim.spec, "CompositeSpec JSON file (default: sigma 1, Brownian W, Y = 0)");
  simCmd->add_option("-n,--level", sim.n, "Grid level")->check(CLI::PositiveNumber);
  simCmd->add_option("--seed", sim.seed, "Master seed");
  simCmd->add_option("--replication", sim.replication, "Replication index (selects the streams)");
  simCmd->add_option("-o,--out", sim.out, "Output CSV (default stdout)");
  simCmd->add_option("--jumps", sim.jumps, "Also write the compound Poisson jumps as time,size CSV");

  DecomposeArgs dec;
  auto* decCmd = app.add_subcommand("decompose", "Recover the Brownian part from a path CSV");
  decCmd->add_option("input", dec.in, "Path CSV with a header row")->required();
  decCmd->add_option("--column", dec.column, "Column holding X on the grid");
  decCmd->add_option("--method", dec.method, "ReorderI or ThresholdII")
      ->check(CLI::IsMember({"ReorderI", "ThresholdII"}));
  decCmd->add_option("--sigma", dec.sigma, "Brownian coefficient for ThresholdII");
  decCmd->add_option("--threshold", dec.threshold, "Fixed a_n for ThresholdII (default log n / sqrt n)");
  decCmd->add_option("--seed", dec.seed, "Seed of the independent walk used by ReorderI");
  decCmd->add_option("--level", dec.level, "Decompose on this coarser level (must divide the input grid)")
      ->check(CLI::PositiveNumber);
  decCmd->add_option("--jumps", dec.jumps, "Jump CSV from simulate; adds scaled_error and cpp_limit columns");
  decCmd->add_option("-o,--out", dec.out, "Output CSV (default stdout)");

  ExperimentArgs exp;
  auto* expCmd = app.add_subcommand("experiment", "Run an experiment from an ExperimentConfig JSON file");
  expCmd->add_option("--config", exp.config, "Config file")->required();
  expCmd->add_option("--raw", exp.raw, "Raw per-replication CSV, written incrementally");
  expCmd->add_option("--summary", exp.summary, "Summary CSV");
  expCmd->add_option("--json", exp.reportJson, "Report JSON (config echo, version, invariants)");
  expCmd->add_option("--seed", exp.seed, "Override masterSeed");
  expCmd->add_option("--threads", exp.threads, "Worker threads (default LEVYSEP_THREADS or all cores)");
  expCmd->add_flag("--resume", exp.resume, "Keep complete replications already in --raw and run the rest");

  RateFitArgs fit;
  auto* fitCmd = app.add_subcommand("rate-fit", "Fit log mean error against log n per label");
  fitCmd->add_option("summary", fit.summary, "Summary CSV")->required();
  fitCmd->add_option("--min-level", fit.minLevel, "Ignore levels below this");
  fitCmd->add_option("-o,--out", fit.out, "Output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simCmd) run_simulate(sim);
    if (*decCmd) run_decompose(dec);
    if (*expCmd) run_experiment_cmd(exp);
    if (*fitCmd) run_rate_fit(fit);
  } catch (const std::exception& e) {
    std::cerr << "levysep: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
