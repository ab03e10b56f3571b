#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(EHBP_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (pipe && fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pipe ? pclose(pipe) : -1;
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) { return std::string(EHBP_CONFIGS) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ehbp_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_doc(const std::string& name, const std::string& text) {
  auto p = fs::temp_directory_path() / ("ehbp_cli_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ValidateAcceptsThePreset) {
  auto r = cli("validate " + config("reference.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST(Cli, ValidateRejectsASmallBattery) {
  auto r = cli("validate " + config("small_battery.json"));
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("node 1 commodity 1: b_max 10 < required 13"), std::string::npos) << r.out;
}

TEST(Cli, MalformedDocumentIsAParseError) {
  auto p = write_doc("malformed", "{\n  \"preset\": \"paper-defaults\",\n  oops\n}\n");
  auto r = cli("validate " + p.string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
}

TEST(Cli, UnknownKeyIsASchemaError) {
  auto p = write_doc("unknown", R"({"preset": "paper-defaults", "simulaton": {}})");
  EXPECT_EQ(cli("validate " + p.string()).code, 2);
}

TEST(Cli, MissingFileAndBadUsage) {
  EXPECT_EQ(cli("validate /no/such/file.json").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("run").code, 1);
}

TEST(Cli, RunWritesTablesFiguresAndManifest) {
  auto dir = scratch("run");
  auto r = cli("run " + config("reference.json") + " --policy SSBP-EH --horizon 1000 --seed 5 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto per_slot = slurp(dir / "per_slot.csv");
  EXPECT_EQ(std::count(per_slot.begin(), per_slot.end(), '\n'), 1001);
  EXPECT_TRUE(fs::exists(dir / "energy_SSBP-EH_5.svg"));
  EXPECT_TRUE(fs::exists(dir / "delay-histogram_SSBP-EH_5.svg"));

  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["seeds"], nlohmann::json::array({5}));
  EXPECT_EQ(manifest["config"]["simulation"]["horizon"], 1000);
  EXPECT_EQ(manifest["config"]["policy"]["kind"], "SSBP-EH");
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  for (const auto& f : manifest["files"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>())) << f;

  // The manifest's effective config reproduces the run byte for byte.
  auto replay_doc = manifest["config"];
  replay_doc["output"]["directory"] = (dir / "replay").string();
  auto p = write_doc("replay", replay_doc.dump());
  ASSERT_EQ(cli("run " + p.string()).code, 0);
  EXPECT_EQ(slurp(dir / "replay" / "per_slot.csv"), per_slot);
  EXPECT_EQ(slurp(dir / "replay" / "delay.csv"), slurp(dir / "delay.csv"));
  auto replay_manifest = nlohmann::json::parse(slurp(dir / "replay" / "manifest.json"));
  EXPECT_EQ(replay_manifest["config_hash"], manifest["config_hash"]);
}

TEST(Cli, RepeatedSeedOverrideIsByteIdentical) {
  auto a = scratch("rep_a"), b = scratch("rep_b");
  const std::string base = "run " + config("reference.json") + " --policy SBP --horizon 300 --seed 9 --out ";
  ASSERT_EQ(cli(base + a.string()).code, 0);
  ASSERT_EQ(cli(base + b.string()).code, 0);
  for (const char* f : {"per_slot.csv", "per_node.csv", "delay.csv", "queued_SBP_9.svg"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
  auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
  ma["config"]["output"].erase("directory");  // the only field that names where it was written
  mb["config"]["output"].erase("directory");
  EXPECT_EQ(ma, mb);
  EXPECT_FALSE(fs::exists(a / "energy_SBP_9.svg"));  // "all" skips energy figures without a battery
}

TEST(Cli, ExplicitEnergyFigureForBaselineIsRejected) {
  auto p = write_doc("energyfig", R"({"preset": "paper-defaults", "policy": {"kind": "SBP"}, "output": {"figures": ["energy"]}})");
  EXPECT_EQ(cli("run " + p.string() + " --horizon 10 --out " + scratch("energyfig").string()).code, 3);
}

TEST(Cli, BatchWritesASummaryPerSeed) {
  auto dir = scratch("batch");
  auto r = cli("batch " + config("reference.json") + " --policy SBP-EH --horizon 200 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto summary = slurp(dir / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 11);
  EXPECT_TRUE(fs::exists(dir / "queued_SBP-EH_10.svg"));
}

TEST(Cli, CompareAllFourPolicies) {
  auto dir = scratch("compare");
  auto r = cli("compare " + config("reference.json") + " --horizon 300 --seed 2 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto table = slurp(dir / "compare_queued.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "seed,t,SBP,SSBP,SBP-EH,SSBP-EH");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 301);
  EXPECT_TRUE(fs::exists(dir / "queued-compare_all_2.svg"));
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["policies"].size(), 4u);
}

TEST(Cli, SampleConfigsValidate) {
  for (const char* f : {"per_source.json", "line_custom.json"}) EXPECT_EQ(cli("validate " + config(f)).code, 0) << f;
}
