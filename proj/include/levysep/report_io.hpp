#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "levysep/harness.hpp"

namespace levysep {

inline constexpr const char* kRawHeader = "alpha_or_model,level,fine_level,replication,seed,error";
inline constexpr const char* kSummaryHeader = "alpha_or_model,level,mean,std,count";

/// %.17g, the round-trip format used by every CSV this library writes.
std::string format_double(double v);

void write_raw_header(std::ostream& out);
void write_raw_rows(std::ostream& out, const std::string& label, std::span<const ErrorSample> records);
void write_summary_csv(std::ostream& out, const std::string& label, std::span<const SummaryRow> rows);
void write_summary_rows(std::ostream& out, const std::string& label, std::span<const SummaryRow> rows);

struct LabeledSample {
  std::string label;
  ErrorSample sample;
};

struct LabeledSummary {
  std::string label;
  SummaryRow row;
};

/// Throws std::runtime_error on a header or field mismatch.
std::vector<LabeledSample> read_raw_csv(std::istream& in);
std::vector<LabeledSummary> read_summary_csv(std::istream& in);

/// Single-column `delta` files used for frozen sampler output.
void write_delta_csv(std::ostream& out, const IncrementSeq& deltas);
IncrementSeq read_delta_csv(std::istream& in);

/// Generic numeric CSV with a header row; columns keyed by name.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[column][row]

  const std::vector<double>& column(const std::string& name) const;
};

Table read_table_csv(std::istream& in);
void write_table_csv(std::ostream& out, const Table& table);

// --- config documents ------------------------------------------------------

nlohmann::json to_json(const ProcessSpec& spec);
ProcessSpec process_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CompositeSpec& spec);
CompositeSpec composite_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

std::string to_string(ExperimentKind kind);
std::string to_string(Method method);

/// config echo, software version, summary and invariant tally.
nlohmann::json report_to_json(const ExperimentReport& report);

}  // namespace levysep
