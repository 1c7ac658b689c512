#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "json.hpp"

using json = nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

/// Runs the CLI with stderr folded into stdout.
CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" RMTCLT_CLI_PATH "' " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rmtclt_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// The number printed after "variance" on the theory table.
double theory_variance(const std::string& out) {
  std::smatch m;
  static const std::regex re(R"(\nvariance\s+(\S+))");
  if (!std::regex_search(out, m, re)) return std::nan("");
  return std::stod(m[1]);
}

std::filesystem::path single_report(const std::filesystem::path& dir, const std::string& kind) {
  std::filesystem::path found;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(kind + "_", 0) == 0 && e.path().extension() == ".json") found = e.path();
  }
  return found;
}

}  // namespace

TEST(Cli, HelpMatchesGoldenFile) {
  const CliRun r = run("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_file(std::filesystem::path(RMTCLT_TEST_DATA) / "cli_help.txt"));
}

TEST(Cli, TheoryReferenceValues) {
  const auto out = scratch("theory");
  const std::string o = " --out " + out.string();
  const CliRun a = run("theory --ensemble wigner --phi monomial:1 --w2 2 --kappa4 0" + o);
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_NEAR(theory_variance(a.out), 2.0, 1e-9);
  const CliRun b = run("theory --ensemble wigner --phi monomial:2 --w2 2 --kappa4 -1.2" + o);
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_NEAR(theory_variance(b.out), 1.6, 1e-9);
  const CliRun c = run("theory --ensemble samplecov --c 1 --kappa4 0 --phi monomial:1" + o);
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_NEAR(theory_variance(c.out), 2.0, 1e-9);
  EXPECT_FALSE(single_report(out, "theory").empty());
  EXPECT_TRUE(std::filesystem::exists(out / "index.json"));
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto out = scratch("usage");
  const std::string o = " --out " + out.string();
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("theory --phi bogus:1" + o).code, 2);
  EXPECT_EQ(run("theory --w2 0" + o).code, 2);
  // a polynomial has no finite Sobolev norm
  EXPECT_EQ(run("norm --phi monomial:2 --s 2" + o).code, 2);
  EXPECT_EQ(run("theory --config " + (out / "missing.json").string() + o).code, 2);
  std::ofstream(out / "bad.json") << R"({"ensemble": {"kind": "wigner", "n": 4}, "replicats": 3})";
  const CliRun bad = run("simulate --config " + (out / "bad.json").string() + o);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("replicats"), std::string::npos) << bad.out;
  std::ofstream(out / "empty.json") << "";
  EXPECT_EQ(run("simulate --config " + (out / "empty.json").string() + o).code, 2);
}

TEST(Cli, NumericFailureExitsThree) {
  // the kernel form window needs more nodes than allowed at this eta
  const auto out = scratch("numeric");
  const CliRun r = run("theory --phi gauss:0,0.5 --eta 1e-7 --out " + out.string());
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST(Cli, SimulateIsDeterministic) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::string args = "simulate --ensemble wigner --n 20 --R 30 --seed 5 --phi gauss:0,0.5 ";
  ASSERT_EQ(run(args + "--workers 1 --out " + a.string()).code, 0);
  ASSERT_EQ(run(args + "--workers 3 --out " + b.string()).code, 0);
  json ja = json::parse(read_file(single_report(a, "simulate")));
  json jb = json::parse(read_file(single_report(b, "simulate")));
  ja.erase("timestamp");
  jb.erase("timestamp");
  ja["config"].erase("workers");
  jb["config"].erase("workers");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(single_report(a, "simulate").filename(), single_report(b, "simulate").filename());
}

TEST(Cli, SmokeConfigKeepsValues) {
  const auto out = scratch("smoke");
  const CliRun r = run("simulate --config " + (std::filesystem::path(RMTCLT_CONFIG_DIR) / "smoke.json").string() +
                    " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(read_file(single_report(out, "simulate")));
  EXPECT_EQ(j["statistics"][0]["values"].size(), 2u);
  bool csv = false;
  for (const auto& e : std::filesystem::directory_iterator(out))
    csv = csv || e.path().string().ends_with("_values.csv");
  EXPECT_TRUE(csv);
}

TEST(Cli, BoundScanPrintsFourRows) {
  const auto out = scratch("scan");
  const CliRun r = run("boundscan --ensemble wigner --n 20 --R 50 --seed 1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(read_file(single_report(out, "boundscan")));
  EXPECT_EQ(j["rows"].size(), 4u);
  EXPECT_EQ(j["notes"].size(), 1u);
}

TEST(Cli, SeedPrecedence) {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  const auto c = scratch("seed_c");
  const std::string args = "simulate --n 10 --R 5 --out ";
  ASSERT_EQ(run(args + a.string(), "RMT_SEED=77").code, 0);
  ASSERT_EQ(run(args + b.string() + " --seed 77").code, 0);
  ASSERT_EQ(run(args + c.string() + " --seed 78", "RMT_SEED=77").code, 0);
  const json ja = json::parse(read_file(single_report(a, "simulate")));
  const json jb = json::parse(read_file(single_report(b, "simulate")));
  const json jc = json::parse(read_file(single_report(c, "simulate")));
  EXPECT_EQ(ja["config"]["seed"], 77);
  EXPECT_EQ(ja["statistics"], jb["statistics"]);
  EXPECT_EQ(jc["config"]["seed"], 78);
  EXPECT_EQ(run(args + a.string(), "RMT_SEED=abc").code, 2);
}

TEST(Cli, SpectrumDump) {
  const auto out = scratch("spectrum");
  const CliRun r = run("spectrum --n 6 --seed 3 --replicate 2 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(read_file(single_report(out, "spectrum")));
  const std::string csv = read_file(out / j["eigenvalues_csv"].get<std::string>());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}
