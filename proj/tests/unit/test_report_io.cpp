#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "levysep/report_io.hpp"

using namespace levysep;
using nlohmann::json;

TEST_SUITE("csv") {
  TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
  }

  TEST_CASE("raw records round trip with header and UNIX newlines") {
    const std::vector<ErrorSample> recs{{10, 1000, 1.0 / 3.0, 0, 7, 0}, {100, 1000, 0.125, 1, 7, 0}};
    std::ostringstream out;
    write_raw_header(out);
    write_raw_rows(out, "0.2", recs);
    const std::string text = out.str();
    CHECK(text.rfind(std::string(kRawHeader) + "\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.find("0.2,10,1000,0,7,0.33333333333333331\n") != std::string::npos);
    std::istringstream in(text);
    const auto back = read_raw_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].label == "0.2");
    CHECK(back[0].sample.value == recs[0].value);
    CHECK(back[1].sample.level == 100);
    CHECK(back[1].sample.fineLevel == 1000);
    CHECK(back[1].sample.replication == 1);
    CHECK(back[1].sample.seed == 7);
  }

  TEST_CASE("summary round trip") {
    const std::vector<SummaryRow> rows{{10, 0.5, 0.25, 3}, {100, 0.2, 0.0, 1}};
    std::ostringstream out;
    write_summary_csv(out, "Bessel3", rows);
    CHECK(out.str().rfind(std::string(kSummaryHeader) + "\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_summary_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].label == "Bessel3");
    CHECK(back[0].row.mean == 0.5);
    CHECK(back[0].row.std == 0.25);
    CHECK(back[1].row.count == 1);
  }

  TEST_CASE("wrong header or row width is rejected") {
    std::istringstream bad("level,error\n1,2\n");
    CHECK_THROWS_AS(read_raw_csv(bad), std::runtime_error);
    std::istringstream shortRow(std::string(kSummaryHeader) + "\nx,1,2\n");
    CHECK_THROWS_AS(read_summary_csv(shortRow), std::runtime_error);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_raw_csv(empty), std::runtime_error);
  }

  TEST_CASE("delta files") {
    const IncrementSeq d(std::vector<double>{0.1, -1e-17, 3.5});
    std::ostringstream out;
    write_delta_csv(out, d);
    CHECK(out.str().rfind("delta\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(read_delta_csv(in) == d);
  }

  TEST_CASE("generic tables") {
    Table t{{"t", "x"}, {{0.0, 0.5, 1.0}, {0.0, 0.1, -0.3}}};
    std::ostringstream out;
    write_table_csv(out, t);
    std::istringstream in(out.str());
    const Table back = read_table_csv(in);
    CHECK(back.columns == t.columns);
    CHECK(back.column("x") == t.data[1]);
    CHECK_THROWS_AS(back.column("y"), std::runtime_error);
  }
}

TEST_SUITE("json") {
  TEST_CASE("every process spec round trips") {
    const std::vector<ProcessSpec> specs{BrownianStd{}, Bessel3{}, Zero{}, Stable{1.3, -0.4, 0.7},
                                         VarianceGamma{0.1, 0.2, 0.3}, CompoundPoisson{2.0, NormalJumps{0.5, 2.0}},
                                         CompoundPoisson{1.0, FixedSign{-1.0}}};
    for (const auto& s : specs) CHECK(to_json(process_spec_from_json(to_json(s))) == to_json(s));
  }

  TEST_CASE("experiment config round trips with field names intact") {
    ExperimentConfig c;
    c.experiment = ExperimentKind::Comparison;
    c.label = "x";
    c.composite = {0.5, BrownianLaw::Bessel3, Stable{1.2, -0.5, 1.0}};
    c.levels = {10, 100};
    c.fineLevel = 1000;
    c.replications = 4;
    c.masterSeed = 123456789012345ULL;
    c.method = Method::ThresholdII;
    c.threshold = ThresholdRule::schedule(0.1, -0.5, 0.0);
    c.verifyInvariants = false;
    c.threads = 2;
    const json j = to_json(c);
    for (const char* key : {"experiment", "label", "composite", "levels", "fineLevel", "replications", "masterSeed",
                            "method", "threshold", "verifyInvariants", "threads"}) {
      CHECK_MESSAGE(j.contains(key), key);
    }
    CHECK(to_json(config_from_json(j)) == j);
    CHECK(config_from_json(j).masterSeed == c.masterSeed);
  }

  TEST_CASE("defaults and rejections") {
    const ExperimentConfig c = config_from_json(json::parse(R"({"levels": [10], "fineLevel": 10})"));
    CHECK(c.experiment == ExperimentKind::Table);
    CHECK(c.method == Method::ReorderI);
    CHECK(c.replications == 1);
    CHECK(std::holds_alternative<Zero>(c.composite.signal));
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"levels": [10], "fineLevel": 10, "seed": 3})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"levels": [10], "fineLevel": 10, "method": "III"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_json(json::parse(R"({"levels": [10], "fineLevel": 10, "composite": {"signal": {"type": "Foo"}}})")),
        std::invalid_argument);
    CHECK_THROWS(config_from_json(json::parse(R"({"fineLevel": 10})")));
  }

  TEST_CASE("report echo") {
    ExperimentReport r;
    r.label = "1.5";
    r.summary = {{10, 0.3, 0.1, 5}};
    r.invariants.checked = 9;
    const json j = report_to_json(r);
    CHECK(j.at("softwareVersion") == kSoftwareVersion);
    CHECK(j.at("summary")[0].at("count") == 5);
    CHECK(j.at("invariants").at("checked") == 9);
    CHECK(j.at("config").contains("levels"));
  }
}

TEST_CASE("shipped configs parse and validate") {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(LEVYSEP_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    const json j = json::parse(in);
    const std::string name = entry.path().filename().string();
    if (name.rfind("spec_", 0) == 0) {
      CHECK_NOTHROW(validate(composite_spec_from_json(j)));
    } else {
      CHECK_NOTHROW(validate(config_from_json(j)));
    }
    ++seen;
  }
  CHECK(seen >= 10);
}
