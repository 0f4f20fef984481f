#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "degenlab/digest.hpp"
#include "degenlab/report.hpp"

using namespace degenlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("degenlab-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json exponents_config(const fs::path& out) {
  return {{"command", "exponents"},
          {"params", {{"n", 3}, {"p", 4}, {"q", 2}, {"s", 8}}},
          {"output_dir", out.string()}};
}

#ifdef DEGENLAB_CLI_PATH
struct Shell {
  int status;
  std::string out;
};

Shell shell(const std::string& args) {
  const std::string cmd = std::string(DEGENLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  Shell s{0, ""};
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) s.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  s.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return s;
}
#endif

}  // namespace

TEST(Digest, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(DumpJson, SortedKeysAndFullPrecision) {
  Json j = {{"b", 0.1}, {"a", {{"z", 1}, {"y", true}}}, {"c", "x"}};
  const std::string s = dump_json(j);
  EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
  EXPECT_LT(s.find("\"y\""), s.find("\"z\""));
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_EQ(Json::parse(s)["b"].get<double>(), 0.1);
}

TEST(DumpJson, NonFiniteBecomesStrings) {
  Json j = {{"a", INFINITY}, {"b", -INFINITY}, {"c", NAN}};
  const Json back = Json::parse(dump_json(j));
  EXPECT_EQ(back["a"], "inf");
  EXPECT_EQ(back["b"], "-inf");
  EXPECT_EQ(back["c"], "nan");
}

TEST(Csv, RendersHeaderAndRows) {
  CsvTable t;
  t.columns = {"k", "u"};
  t.rows = {{"1", "2.5"}, {"2", "3"}};
  EXPECT_EQ(t.render(), "k,u\n1,2.5\n2,3\n");
}

TEST(Schema, ReportsEveryError) {
  const Json bad = {{"command", "exponents"},
                    {"params", {{"n", 1}, {"q", "x"}, {"bogus", 1}}},
                    {"colour", "red"}};
  const auto errors = validate_config(bad);
  EXPECT_EQ(errors.size(), 4u);
  EXPECT_TRUE(validate_config({{"command", "verify"}}).size() == 1);
  EXPECT_TRUE(validate_config({{"command", "verify"}, {"subcommand", "nope"}}).size() == 1);
  EXPECT_TRUE(validate_config({{"command", "norm"}}).size() == 2);  // a and b are required
  EXPECT_TRUE(validate_config(exponents_config("x")).empty());
}

TEST(Schema, NormalizationFillsDefaults) {
  const Json n = normalize_config({{"command", "example"}, {"subcommand", "blowup"}});
  EXPECT_EQ(n["options"]["kmax"], 30);
  EXPECT_EQ(n["example"]["id"], "EX1");
  EXPECT_EQ(n["seed"], 0);
  EXPECT_EQ(n["schema_version"], kSchemaVersion);
}

TEST(Run, MalformedConfigWritesNothing) {
  const fs::path dir = scratch_dir("malformed");
  Json cfg = exponents_config(dir);
  cfg["params"]["n"] = "three";
  std::ostringstream err;
  EXPECT_EQ(run(cfg, err), 2);
  EXPECT_FALSE(fs::exists(dir));
  EXPECT_NE(err.str().find("params.n"), std::string::npos);
}

TEST(Run, WritesReportAndManifest) {
  const fs::path dir = scratch_dir("exponents");
  std::ostringstream err;
  ASSERT_EQ(run(exponents_config(dir), err), 0) << err.str();
  const Json report = Json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["status"], "ok");
  EXPECT_EQ(report["result"]["s0"], 6);
  EXPECT_EQ(report["result"]["exact"]["chi"], "7/6");
  const Json manifest = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["digests"]["report.json"], sha256_hex(slurp(dir / "report.json")));
  EXPECT_EQ(manifest["config_digest"].get<std::string>().size(), 64u);
}

TEST(Run, ComputationFailureIsExitOne) {
  const fs::path dir = scratch_dir("failure");
  // A degenerate coefficient on a ball larger than its domain.
  const Json cfg = {{"command", "coefficients"},
                    {"options", {{"beta", 1.0}, {"theta", 0.5}, {"R", 0.9}}},
                    {"output_dir", dir.string()}};
  std::ostringstream err;
  EXPECT_EQ(run(cfg, err), 1);
  const Json report = Json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["status"], "error");
  EXPECT_FALSE(report["diagnostic"].get<std::string>().empty());
}

TEST(Run, EnvironmentOverridesOutputDir) {
  const fs::path dir = scratch_dir("env");
  const fs::path ignored = scratch_dir("env-ignored");
  setenv(kOutputDirEnv, dir.c_str(), 1);
  std::ostringstream err;
  const int code = run(exponents_config(ignored), err);
  unsetenv(kOutputDirEnv);
  EXPECT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_FALSE(fs::exists(ignored));
}

TEST(Run, ByteIdenticalReports) {
  const Json configs[] = {
      {{"command", "verify"}, {"subcommand", "harnack"}, {"seed", 3}},
      {{"command", "example"}, {"subcommand", "blowup"}, {"options", {{"kmax", 20}}}},
      {{"command", "kernel"}, {"options", {{"x", {0.1, 0.001}}}}},
  };
  int i = 0;
  for (Json cfg : configs) {
    const fs::path a = scratch_dir("det-a" + std::to_string(i));
    const fs::path b = scratch_dir("det-b" + std::to_string(i));
    ++i;
    std::ostringstream err;
    cfg["output_dir"] = a.string();
    ASSERT_EQ(run(cfg, err), 0) << err.str();
    cfg["output_dir"] = b.string();
    ASSERT_EQ(run(cfg, err), 0) << err.str();
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
  }
}

TEST(Run, SeedChangesOrderNotResults) {
  Json cfg = {{"command", "verify"}, {"subcommand", "harnack"}};
  const Json r1 = execute(normalize_config(cfg)).report;
  cfg["seed"] = 12345;
  const Json r2 = execute(normalize_config(cfg)).report;
  EXPECT_EQ(r1["result"], r2["result"]);
}

TEST(Commands, ReportWithDefaultsSkipsLogBound) {
  const RunOutput out = execute(normalize_config({{"command", "report"}}));
  ASSERT_EQ(out.exit_code, 0) << dump_json(out.report);
  EXPECT_EQ(out.report["result"]["verify_log_bound"], "skipped: needs finite s");
  EXPECT_TRUE(out.report["result"]["exponents"].is_object());
}

TEST(Commands, DegeneratePlanarSolveNeedsOddCells) {
  Json cfg = {{"command", "solve"},
              {"options", {{"geometry", "planar"}, {"R", 0.3}, {"beta", 1.0}, {"theta", 0.5}}},
              {"solver", {{"cells", 64}}}};
  const RunOutput even = execute(normalize_config(cfg));
  EXPECT_EQ(even.exit_code, 1);
  EXPECT_NE(even.report["diagnostic"].get<std::string>().find("odd cell count"), std::string::npos);
  cfg["solver"]["cells"] = 63;
  const RunOutput odd = execute(normalize_config(cfg));
  EXPECT_EQ(odd.exit_code, 0) << dump_json(odd.report);
  EXPECT_TRUE(odd.report["result"]["max_principle"]["holds"].get<bool>());
}

#ifdef DEGENLAB_CLI_PATH
TEST(Cli, ExponentsFromFlags) {
  const fs::path dir = scratch_dir("cli-exp");
  const Shell s = shell("exponents --n 3 --p 4 --q 2 --s 8 --output-dir " + dir.string());
  EXPECT_EQ(s.status, 0);
  EXPECT_NE(s.out.find("\"s0\": 6"), std::string::npos);
}

TEST(Cli, BlowupCsvIncreases) {
  const fs::path dir = scratch_dir("cli-blowup");
  const Shell s = shell("example blowup --id EX1 --n 3 --q 2 --kmax 20 --csv --output-dir " + dir.string());
  ASSERT_EQ(s.status, 0);
  std::istringstream in(s.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,eps,u");
  double previous = -INFINITY;
  int rows = 0;
  while (std::getline(in, line)) {
    const double u = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_GT(u, previous);
    previous = u;
    ++rows;
  }
  EXPECT_EQ(rows, 19);
}

TEST(Cli, MalformedConfigFileExitsTwo) {
  const fs::path dir = scratch_dir("cli-bad");
  const fs::path cfg = fs::temp_directory_path() / "degenlab-test-bad.json";
  std::ofstream(cfg) << R"({"command": "exponents", "params": {"n": 0}, "output_dir": ")" << dir.string() << "\"}";
  EXPECT_EQ(shell("exponents --config " + cfg.string()).status, 2);
  EXPECT_FALSE(fs::exists(dir));
  std::ofstream(cfg) << "{not json";
  EXPECT_EQ(shell("exponents --config " + cfg.string()).status, 2);
  EXPECT_EQ(shell("exponents --no-such-flag 1").status, 2);
}

TEST(Cli, ConfigFileWinsOverFlags) {
  const fs::path dir = scratch_dir("cli-cfg");
  const fs::path cfg = fs::temp_directory_path() / "degenlab-test-cfg.json";
  std::ofstream(cfg) << R"({"command": "exponents", "params": {"q": 3}})";
  const Shell s = shell("exponents --q 2 --n 3 --config " + cfg.string() + " --output-dir " + dir.string());
  ASSERT_EQ(s.status, 0);
  const Json report = Json::parse(s.out);
  EXPECT_EQ(report["config"]["params"]["q"], 3);
  EXPECT_EQ(report["result"]["s0"], 3);
}
#endif
