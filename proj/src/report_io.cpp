#include "levysep/report_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace levysep {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
  }
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!next_line(in, line)) throw std::runtime_error("empty CSV, expected header '" + std::string(header) + "'");
  if (line != header) throw std::runtime_error("unexpected CSV header '" + line + "', expected '" + header + "'");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

json jump_law_to_json(const JumpLaw& law) {
  return std::visit(overloaded{
                        [](const NormalJumps& j) { return json{{"type", "NormalJumps"}, {"mean", j.mean}, {"std", j.std}}; },
                        [](const FixedSign& j) { return json{{"type", "FixedSign"}, {"size", j.size}}; },
                    },
                    law);
}

JumpLaw jump_law_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "NormalJumps") return NormalJumps{j.value("mean", 0.0), j.value("std", 1.0)};
  if (type == "FixedSign") return FixedSign{j.value("size", 1.0)};
  throw std::invalid_argument("unknown jumpLaw type '" + type + "'");
}

json threshold_to_json(const ThresholdRule& rule) {
  switch (rule.kind) {
    case ThresholdRule::Kind::Default:
      return json{{"kind", "Default"}};
    case ThresholdRule::Kind::Fixed:
      return json{{"kind", "Fixed"}, {"value", rule.value}};
    case ThresholdRule::Kind::Schedule:
      return json{{"kind", "Schedule"}, {"coef", rule.coef}, {"nExponent", rule.nExponent}, {"logExponent", rule.logExponent}};
  }
  return {};
}

ThresholdRule threshold_from_json(const json& j) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "Default") return {};
  if (kind == "Fixed") return ThresholdRule::fixed(j.at("value").get<double>());
  if (kind == "Schedule") {
    return ThresholdRule::schedule(j.value("coef", 1.0), j.value("nExponent", -0.5), j.value("logExponent", 1.0));
  }
  throw std::invalid_argument("unknown threshold kind '" + kind + "'");
}

ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "table") return ExperimentKind::Table;
  if (s == "comparison") return ExperimentKind::Comparison;
  if (s == "cpp_limit") return ExperimentKind::CppLimit;
  if (s == "nosigma") return ExperimentKind::NoSigma;
  if (s == "brownian_rate") return ExperimentKind::BrownianRate;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

Method method_from_string(const std::string& s) {
  if (s == "ReorderI") return Method::ReorderI;
  if (s == "ThresholdII") return Method::ThresholdII;
  throw std::invalid_argument("unknown method '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_raw_header(std::ostream& out) { out << kRawHeader << '\n'; }

void write_raw_rows(std::ostream& out, const std::string& label, std::span<const ErrorSample> records) {
  for (const auto& r : records) {
    out << label << ',' << r.level << ',' << r.fineLevel << ',' << r.replication << ',' << r.seed << ','
        << format_double(r.value) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::string& label, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  write_summary_rows(out, label, rows);
}

void write_summary_rows(std::ostream& out, const std::string& label, std::span<const SummaryRow> rows) {
  for (const auto& r : rows) {
    out << label << ',' << r.level << ',' << format_double(r.mean) << ',' << format_double(r.std) << ',' << r.count
        << '\n';
  }
}

std::vector<LabeledSample> read_raw_csv(std::istream& in) {
  expect_header(in, kRawHeader);
  std::vector<LabeledSample> out;
  std::string line;
  while (next_line(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("raw CSV row needs 6 fields: '" + line + "'");
    LabeledSample s;
    s.label = f[0];
    s.sample.level = parse_u64(f[1], "level");
    s.sample.fineLevel = parse_u64(f[2], "fine_level");
    s.sample.replication = parse_u64(f[3], "replication");
    s.sample.seed = parse_u64(f[4], "seed");
    s.sample.value = parse_double(f[5], "error");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LabeledSummary> read_summary_csv(std::istream& in) {
  expect_header(in, kSummaryHeader);
  std::vector<LabeledSummary> out;
  std::string line;
  while (next_line(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw std::runtime_error("summary CSV row needs 5 fields: '" + line + "'");
    LabeledSummary s;
    s.label = f[0];
    s.row.level = parse_u64(f[1], "level");
    s.row.mean = parse_double(f[2], "mean");
    s.row.std = parse_double(f[3], "std");
    s.row.count = parse_u64(f[4], "count");
    out.push_back(std::move(s));
  }
  return out;
}

void write_delta_csv(std::ostream& out, const IncrementSeq& deltas) {
  out << "delta\n";
  for (double d : deltas.deltas()) out << format_double(d) << '\n';
}

IncrementSeq read_delta_csv(std::istream& in) {
  expect_header(in, "delta");
  std::vector<double> values;
  std::string line;
  while (next_line(in, line)) values.push_back(parse_double(line, "delta"));
  return IncrementSeq(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return data[c];
  }
  throw std::runtime_error("CSV has no column '" + name + "'");
}

Table read_table_csv(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw std::runtime_error("empty CSV");
  Table table;
  table.columns = split_csv_line(line);
  table.data.resize(table.columns.size());
  while (next_line(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != table.columns.size()) throw std::runtime_error("CSV row has wrong field count: '" + line + "'");
    for (std::size_t c = 0; c < f.size(); ++c) table.data[c].push_back(parse_double(f[c], table.columns[c]));
  }
  return table;
}

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  const std::size_t rows = table.data.empty() ? 0 : table.data[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << format_double(table.data[c][r]);
    out << '\n';
  }
}

json to_json(const ProcessSpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianStd&) { return json{{"type", "BrownianStd"}}; },
                        [](const Bessel3&) { return json{{"type", "Bessel3"}}; },
                        [](const Zero&) { return json{{"type", "Zero"}}; },
                        [](const Stable& s) {
                          return json{{"type", "Stable"}, {"alpha", s.alpha}, {"beta", s.beta}, {"scale", s.scale}};
                        },
                        [](const VarianceGamma& v) {
                          return json{{"type", "VarianceGamma"}, {"theta", v.theta}, {"sigmaVg", v.sigmaVg}, {"nu", v.nu}};
                        },
                        [](const CompoundPoisson& c) {
                          return json{{"type", "CompoundPoisson"}, {"rate", c.rate}, {"jumpLaw", jump_law_to_json(c.jumpLaw)}};
                        },
                    },
                    spec);
}

ProcessSpec process_spec_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "BrownianStd") return BrownianStd{};
  if (type == "Bessel3") return Bessel3{};
  if (type == "Zero") return Zero{};
  if (type == "Stable") return Stable{j.at("alpha").get<double>(), j.value("beta", 0.0), j.value("scale", 1.0)};
  if (type == "VarianceGamma") {
    const VarianceGamma d;
    return VarianceGamma{j.value("theta", d.theta), j.value("sigmaVg", d.sigmaVg), j.value("nu", d.nu)};
  }
  if (type == "CompoundPoisson") {
    CompoundPoisson c{j.at("rate").get<double>(), FixedSign{}};
    if (j.contains("jumpLaw")) c.jumpLaw = jump_law_from_json(j.at("jumpLaw"));
    return c;
  }
  throw std::invalid_argument("unknown process type '" + type + "'");
}

json to_json(const CompositeSpec& spec) {
  return json{{"sigma", spec.sigma},
              {"brownianLaw", spec.brownianLaw == BrownianLaw::Bessel3 ? "Bessel3" : "BrownianStd"},
              {"signal", to_json(spec.signal)}};
}

CompositeSpec composite_spec_from_json(const json& j) {
  reject_unknown_keys(j, {"sigma", "brownianLaw", "signal"}, "composite");
  CompositeSpec spec;
  spec.sigma = j.value("sigma", 1.0);
  const std::string law = j.value("brownianLaw", std::string("BrownianStd"));
  if (law == "Bessel3") {
    spec.brownianLaw = BrownianLaw::Bessel3;
  } else if (law == "BrownianStd") {
    spec.brownianLaw = BrownianLaw::BrownianStd;
  } else {
    throw std::invalid_argument("unknown brownianLaw '" + law + "'");
  }
  if (j.contains("signal")) spec.signal = process_spec_from_json(j.at("signal"));
  return spec;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Table: return "table";
    case ExperimentKind::Comparison: return "comparison";
    case ExperimentKind::CppLimit: return "cpp_limit";
    case ExperimentKind::NoSigma: return "nosigma";
    case ExperimentKind::BrownianRate: return "brownian_rate";
  }
  return "unknown";
}

std::string to_string(Method method) { return method == Method::ReorderI ? "ReorderI" : "ThresholdII"; }

json to_json(const ExperimentConfig& c) {
  return json{{"experiment", to_string(c.experiment)},
              {"label", c.label},
              {"composite", to_json(c.composite)},
              {"levels", c.levels},
              {"fineLevel", c.fineLevel},
              {"replications", c.replications},
              {"masterSeed", c.masterSeed},
              {"method", to_string(c.method)},
              {"threshold", threshold_to_json(c.threshold)},
              {"verifyInvariants", c.verifyInvariants},
              {"threads", c.threads}};
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"experiment", "label", "composite", "levels", "fineLevel", "replications", "masterSeed",
                       "method", "threshold", "verifyInvariants", "threads"},
                      "experiment config");
  ExperimentConfig c;
  c.experiment = experiment_from_string(j.value("experiment", std::string("table")));
  c.label = j.value("label", std::string());
  if (j.contains("composite")) c.composite = composite_spec_from_json(j.at("composite"));
  c.levels = j.at("levels").get<std::vector<std::size_t>>();
  c.fineLevel = j.at("fineLevel").get<std::size_t>();
  c.replications = j.value("replications", std::size_t{1});
  c.masterSeed = j.value("masterSeed", std::uint64_t{0});
  c.method = method_from_string(j.value("method", std::string("ReorderI")));
  if (j.contains("threshold")) c.threshold = threshold_from_json(j.at("threshold"));
  c.verifyInvariants = j.value("verifyInvariants", true);
  c.threads = j.value("threads", std::size_t{0});
  return c;
}

json report_to_json(const ExperimentReport& report) {
  json summary = json::array();
  for (const auto& r : report.summary) {
    summary.push_back({{"level", r.level}, {"mean", r.mean}, {"std", r.std}, {"count", r.count}});
  }
  return json{{"label", report.label},
              {"softwareVersion", report.softwareVersion},
              {"config", to_json(report.config)},
              {"summary", summary},
              {"records", report.records.size()},
              {"invariants",
               {{"checked", report.invariants.checked},
                {"violations", report.invariants.violations},
                {"messages", report.invariants.messages}}}};
}

}  // namespace levysep
