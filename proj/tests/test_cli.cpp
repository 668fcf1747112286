#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "semm/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "semm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = semm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(testing::TempDir()) / ("semm_cli_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  fs::path dir_;
};

const char* kSemmConfig = R"json({
  "seed": 3,
  "ensemble": {"n_centers": 1024, "stark_nodes": 8,
               "line_shape": {"kind": "gaussian", "fwhm": 32e3},
               "stark_shape": {"kind": "delta", "k0": 0.43}},
  "semm": {"t2": 1e-4, "t3": 1e-3, "t5_offset": 1e-3, "half_window": 2e-5,
           "stark": {"E": 1000, "Ts": "1/(4*0.43*1000)"}},
  "sweep": {"E": 2000, "ts": {"from": 0, "to": 8e-4, "count": 9}},
  "tomography": {},
  "noise": {"finesse": 100, "opacity": 0.02, "mu": 1.5e-5}
})json";

}  // namespace

TEST_F(CliTest, help_exits_zero) {
  const Outcome o = run_cli({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, missing_subcommand_is_invalid) { EXPECT_EQ(run_cli({}).code, 2); }

TEST_F(CliTest, unknown_flag_is_invalid) { EXPECT_EQ(run_cli({"noise", "--bogus"}).code, 2); }

TEST_F(CliTest, missing_config_file) {
  EXPECT_EQ(run_cli({"--config", (dir_ / "nope.json").string(), "noise"}).code, 2);
}

TEST_F(CliTest, missing_sequence_file) {
  const fs::path cfg = write("c.json", R"json({"ensemble": {"n_centers": 2}, "sequence": {"file": "missing.seq"}})json");
  const Outcome o = run_cli({"--config", cfg.string(), "--output", (dir_ / "out").string(), "simulate"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("sequence.file"), std::string::npos);
}

TEST_F(CliTest, invalid_values_are_reported) {
  const fs::path bad = write("bad.json", R"json({"ensemble": {"n_centers": 3}})json");
  const Outcome o = run_cli({"--config", bad.string(), "simulate"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("n_centers"), std::string::npos);
  EXPECT_EQ(run_cli({"--config", write("k.json", R"json({"noize": {}})json").string(), "noise"}).code, 2);
  EXPECT_EQ(run_cli({"--config", write("j.json", "{").string(), "noise"}).code, 2);
  const fs::path order = write("o.json", R"json({"ensemble": {"n_centers": 2}, "semm": {"t2": 6e-3, "t3": 8.75e-3}})json");
  EXPECT_EQ(run_cli({"--config", order.string(), "--dry-run", "simulate"}).code, 2);
}

TEST_F(CliTest, dry_run_writes_nothing) {
  const fs::path cfg = write("c.json", kSemmConfig);
  const fs::path out = dir_ / "out";
  const Outcome o = run_cli({"--config", cfg.string(), "--output", out.string(), "--dry-run", "simulate"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("config ok"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, simulate_writes_traces) {
  const fs::path cfg = write("c.json", kSemmConfig);
  const fs::path out = dir_ / "out";
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--output", out.string(), "simulate"}).code, 0);
  for (const char* f : {"echo1.csv", "echo2.csv", "stimulated.csv", "simulate_report.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string csv = slurp(out / "echo1.csv");
  EXPECT_EQ(csv.rfind("time_s,re_P,im_P,abs_P,abs2_P\n", 0), 0u);
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--output", out.string(), "--format", "json", "simulate"}).code, 0);
  EXPECT_TRUE(fs::exists(out / "echo2.json"));
}

TEST_F(CliTest, simulate_from_sequence_text) {
  write("echo.seq", "rf area=pi/2 at=0\nrf area=pi at=1e-3\nacquire echo from=1.99e-3 to=2.01e-3\n");
  const fs::path cfg = write(
      "c.json",
      R"json({"ensemble": {"n_centers": 512, "line_shape": {"kind": "gaussian", "fwhm": 32e3}}, "sequence": {"file": "echo.seq"}})json");
  const Outcome o = run_cli({"--config", cfg.string(), "--output", (dir_ / "out").string(), "simulate"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "echo.csv"));
}

TEST_F(CliTest, every_subcommand_is_deterministic) {
  const fs::path cfg = write("c.json", kSemmConfig);
  for (const char* cmd : {"simulate", "sweep", "suppression", "tomography", "cancel-solve", "noise", "table"}) {
    const fs::path a = dir_ / (std::string(cmd) + "_a");
    const fs::path b = dir_ / (std::string(cmd) + "_b");
    const Outcome oa = run_cli({"--config", cfg.string(), "--output", a.string(), cmd});
    const Outcome ob = run_cli({"--config", cfg.string(), "--output", b.string(), cmd});
    ASSERT_EQ(oa.code, 0) << cmd << ": " << oa.err;
    ASSERT_EQ(ob.code, 0) << cmd;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << cmd << " " << entry.path().filename();
    }
    EXPECT_GT(files, 0u) << cmd;
  }
}

TEST_F(CliTest, seed_flag_overrides_config) {
  const fs::path cfg = write("c.json", R"json({"seed": 1, "noise": {}})json");
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--seed", "99", "--output", dir_.string(), "noise"}).code, 0);
  EXPECT_NE(slurp(dir_ / "noise.json").find("\"seed\": 99"), std::string::npos);
}

TEST_F(CliTest, cancel_without_root_is_runtime_failure) {
  const fs::path cfg = write("c.json", R"json({"cancel": {"distribution": {"kind": "mixture", "components": [
      {"weight": 0.6, "dist": {"kind": "delta", "k0": 0}},
      {"weight": 0.4, "dist": {"kind": "delta", "k0": 1}}]}, "x_max": 10}})json");
  const Outcome o = run_cli({"--config", cfg.string(), "--output", dir_.string(), "cancel-solve"});
  EXPECT_EQ(o.code, 1);
  EXPECT_TRUE(fs::exists(dir_ / "cancel.json"));
}

TEST_F(CliTest, table_defaults_list_four_systems) {
  const Outcome o = run_cli({"--output", dir_.string(), "table"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("NV"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "table.json").find("inconsistent"), std::string::npos);
}

TEST_F(CliTest, sweep_csv_has_oracle_column) {
  const fs::path cfg = write("c.json", kSemmConfig);
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--output", dir_.string(), "sweep"}).code, 0);
  std::ifstream in(dir_ / "sweep.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "Ts_s,normalized_intensity,oracle_value");
  int rows = 0;
  while (std::getline(in, line)) {
    double ts, sim, ref;
    char c1, c2;
    std::istringstream(line) >> ts >> c1 >> sim >> c2 >> ref;
    EXPECT_NEAR(sim, ref, 1e-6) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 9);
}
