#include "qdisc/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

namespace qdisc {
namespace {

const std::string kSamples = QDISC_SAMPLES_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return kSamples + "/" + name; }

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qdisc_cli_test_" + name);
}

std::string value_of(const std::string& table, const std::string& key) {
  std::istringstream in(table);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " ", 0) == 0) {
      const std::size_t pos = line.find_last_of(' ');
      return line.substr(pos + 1);
    }
  }
  return {};
}

TEST(CliBounds, WorkedExampleTable) {
  const CliRun r = run({"bounds", sample("messenger.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value_of(r.out, "spectral_bound"), "0.833333");
  EXPECT_EQ(value_of(r.out, "pure_bound"), "0.833333");
  EXPECT_EQ(value_of(r.out, "classical_top_d"), "0.833333");
  EXPECT_EQ(value_of(r.out, "dimension_ceiling"), "1.000000");
  EXPECT_EQ(value_of(r.out, "effective_dimension"), "2");
}

TEST(CliBounds, SingleMessageIsPerfect) {
  const CliRun r = run({"bounds", sample("single_message.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value_of(r.out, "spectral_bound"), "1.000000");
  EXPECT_EQ(value_of(r.out, "dimension_ceiling"), "1.500000");
  EXPECT_EQ(value_of(r.out, "classical_top_d"), "1.000000");
  EXPECT_EQ(value_of(r.out, "pure_bound"), "n/a");
}

TEST(CliBounds, JsonParsesBack) {
  const CliRun r = run({"--format", "json", "bounds", sample("messenger.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const BoundReport b = io::bound_report_from_json(io::Json::parse(r.out));
  EXPECT_NEAR(b.spectral_bound, 5.0 / 6.0, 1e-15);
  ASSERT_TRUE(b.pure_bound.has_value());
  EXPECT_NEAR(*b.pure_bound, 5.0 / 6.0, 1e-15);
}

TEST(CliBounds, CsvHasHeaderAndOneRow) {
  const CliRun r = run({"bounds", sample("trine.json"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("effective_dimension,classical_top_d,", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST(CliBounds, CompressionChangesEffectiveDimension) {
  const auto path = temp("embedded.json");
  Ensemble e;
  e.dimension = 4;
  e.add_pure(0.5, {1.0, 0.0, 0.0, 0.0});
  e.add_pure(0.5, {0.0, 1.0, 0.0, 0.0});
  io::write_ensemble(e, path.string());
  EXPECT_EQ(value_of(run({"bounds", path.string()}).out, "effective_dimension"), "2");
  EXPECT_EQ(value_of(run({"--no-compress", "bounds", path.string()}).out, "effective_dimension"), "4");
  std::filesystem::remove(path);
}

TEST(CliErrors, ExitCodes) {
  const auto bad_json = temp("bad.json");
  io::write_text(bad_json.string(), "{\"dimension\": 2, \"messages\": [");
  EXPECT_EQ(run({"bounds", bad_json.string()}).code, 2);

  const auto empty = temp("empty.json");
  io::write_text(empty.string(), "{\"dimension\": 2, \"messages\": []}");
  EXPECT_EQ(run({"bounds", empty.string()}).code, 2);

  EXPECT_EQ(run({"bounds", sample("missing.json")}).code, 1);

  const auto invalid = temp("invalid.json");
  io::write_text(invalid.string(),
                 R"({"dimension": 1, "messages": [{"prior": 0.4, "state": {"kind": "pure", "vector": [[1,0]]}}]})");
  const CliRun r = run({"bounds", invalid.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("prior sum"), std::string::npos);

  EXPECT_EQ(run({"solve", sample("messenger.json"), "--method", "helstrom"}).code, 4);
  for (const auto& p : {bad_json, empty, invalid}) std::filesystem::remove(p);
}

TEST(CliSolve, FixedPointOnSamples) {
  CliRun r = run({"--format", "json", "solve", sample("messenger.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  io::Json j = io::Json::parse(r.out);
  EXPECT_NEAR(j["success"].get<double>(), 5.0 / 6.0, 1e-6);
  EXPECT_NEAR(j["gap"].get<double>(), 0.0, 1e-6);
  EXPECT_TRUE(j["converged"].get<bool>());

  r = run({"--format", "json", "solve", sample("trine.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  j = io::Json::parse(r.out);
  EXPECT_NEAR(j["success"].get<double>(), 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(j["spectral_bound"].get<double>(), 2.0 / 3.0, 1e-12);
}

TEST(CliSolve, OtherMethods) {
  CliRun r = run({"--format", "json", "solve", sample("binary_mixed.json"), "--method", "helstrom"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double h = io::Json::parse(r.out)["success"].get<double>();
  EXPECT_NEAR(h, 0.6, 1e-12);

  r = run({"--format", "json", "solve", sample("binary_mixed.json"), "--method", "brute", "--grid", "101"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(io::Json::parse(r.out)["success"].get<double>(), h, 1e-9);

  r = run({"--format", "json", "solve", sample("trine.json"), "--method", "pgm"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(io::Json::parse(r.out)["success"].get<double>(), 2.0 / 3.0, 1e-12);
}

TEST(CliSolve, EmittedMeasurementCertifies) {
  const auto meas = temp("emitted.json");
  ASSERT_EQ(run({"solve", sample("trine.json"), "--emit-measurement", meas.string()}).code, 0);
  const CliRun r = run({"certify", sample("trine.json"), meas.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  std::filesystem::remove(meas);
}

TEST(CliCertify, TightInstance) {
  const CliRun r = run({"--format", "json", "certify", sample("messenger.json"),
                     sample("messenger_measurement.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json j = io::Json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_NEAR(j["total"].get<double>(), 2.0, 1e-12);
  std::vector<double> s;
  for (const auto& b : j["budgets"])
    if (b["lambda"].get<double>() > 0.5) s.push_back(b["s"].get<double>());
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[0], 1.0, 1e-12);
  EXPECT_NEAR(s[1], 1.0, 1e-12);
  EXPECT_NEAR(s[2], 0.0, 1e-12);

  const CliRun table = run({"certify", sample("messenger.json"), sample("messenger_measurement.json")});
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("\nPASS\n"), std::string::npos);
}

TEST(CliCertify, DimensionMismatch) {
  const CliRun r = run({"certify", sample("single_message.json"), sample("messenger_measurement.json")});
  EXPECT_EQ(r.code, 4);
}

TEST(CliConstruct, PureAndMixed) {
  const auto ens = temp("constructed.json");
  const auto meas = temp("constructed_meas.json");
  CliRun r = run({"--format", "json", "construct", "pure", "--priors", "0.5,0.3333333333333333,0.16666666666666666",
               "--dim", "2", "--ensemble-out", ens.string(), "--measurement-out", meas.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  io::Json j = io::Json::parse(r.out);
  EXPECT_NEAR(j["claimed_value"].get<double>(), 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(j["achieved"].get<double>(), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(run({"certify", ens.string(), meas.string()}).code, 0);

  r = run({"--format", "json", "construct", "mixed", "--spectrum", sample("two_message_spectrum.json"),
           "--dim", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = io::Json::parse(r.out);
  EXPECT_NEAR(j["achieved"].get<double>(), 0.8, 1e-12);
  EXPECT_NEAR(j["spectral_bound"].get<double>(), 0.8, 1e-12);
  const Ensemble e = io::ensemble_from_json(j["ensemble"]);
  EXPECT_EQ(e.size(), 2u);

  EXPECT_EQ(run({"construct", "pure", "--priors", "0.5,0.6", "--dim", "1"}).code, 4);
  for (const auto& p : {ens, meas}) std::filesystem::remove(p);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(CliSweep, Reproducible) {
  const std::vector<std::string> args{"sweep", "--count", "100", "--dim", "2", "--messages", "3",
                                      "--seed", "7"};
  const CliRun a = run(args);
  const CliRun b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = parse_csv(a.out);
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0][0], "seed");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 10u);
    const double bound = std::stod(rows[i][3]), fp = std::stod(rows[i][6]), pg = std::stod(rows[i][5]);
    EXPECT_LE(fp, bound + 1e-9);
    EXPECT_LE(pg, fp + 1e-9);
    EXPECT_LE(bound, std::stod(rows[i][4]) + 1e-12);
    EXPECT_TRUE(rows[i][9].empty());
  }
  EXPECT_NE(run({"sweep", "--count", "5", "--seed", "8"}).out, run({"sweep", "--count", "5", "--seed", "7"}).out);
}

TEST(CliSweep, PureStatesMeetTopPriors) {
  const CliRun r = run({"sweep", "--count", "20", "--dim", "2", "--messages", "4", "--seed", "3", "--pure"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_NEAR(std::stod(rows[i][3]), std::stod(rows[i][8]), 1e-12);
}

TEST(CliSweep, BinaryMatchesHelstrom) {
  const auto out = temp("sweep.csv");
  const CliRun r = run({"sweep", "--count", "20", "--dim", "3", "--messages", "2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto rows = parse_csv(io::read_text(out.string()));
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_NEAR(std::stod(rows[i][6]), std::stod(rows[i][9]), 1e-5);
  std::filesystem::remove(out);
}

TEST(CliBinary, ExitCodesFromProcess) {
  const std::string cli = QDISC_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status("bounds " + sample("messenger.json")), 0);
  EXPECT_EQ(status("bounds " + sample("nope.json")), 1);
  EXPECT_EQ(status("certify " + sample("single_message.json") + " " + sample("messenger_measurement.json")), 4);
  EXPECT_NE(status("frobnicate"), 0);
}

}  // namespace
}  // namespace qdisc
