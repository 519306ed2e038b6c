#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = "cd '" + dir.string() + "' && '" FDSME_CLI "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream s;
  s << in.rdbuf();
  r.out = s.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("fdsme_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  void write_config(const std::string& body) { std::ofstream(dir / "run.json") << body; }

  fs::path dir;
};

const char* kSmall = R"({
  // small stationary ensemble
  "model": {"kind": "llg_fluc_diss", "nu": 0.5, "h": {"family": "cosine", "alpha": 0.1}},
  "grid": {"n": 24},
  "scheme": {"dt": 1e-3},
  "time": {"t_burn_in": 0.5, "t_total": 1.5, "sample_stride": 5},
  "ensemble": {"n_trajectories": 4, "master_seed": 3},
  "checks": {"energy_t": 0.5}
})";

}  // namespace

TEST_F(Cli, BoundPrintsBothValues) {
  const Result r = cli("bound --alpha 0.1", dir);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0.22832525"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.2298"), std::string::npos) << r.out;
}

TEST_F(Cli, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(cli("run", dir).code, 2);
  EXPECT_EQ(cli("run --config missing.json", dir).code, 2);
  write_config(R"({"model": {"nu": 3}, "grid": {"n": 1}})");
  const Result r = cli("run --config run.json", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("model.nu"), std::string::npos) << r.out;
  EXPECT_EQ(cli("verify nosuch", dir).code, 2);
  EXPECT_EQ(cli("bound --alpha 0", dir).code, 2);
  EXPECT_EQ(cli("run --config run.json --threads 0", dir).code, 2);
}

TEST_F(Cli, SweepWithoutListIsConfigError) {
  write_config(kSmall);
  EXPECT_EQ(cli("sweep --config run.json", dir).code, 2);
}

TEST_F(Cli, RunWritesArtifactsReproducibly) {
  write_config(kSmall);
  const Result a = cli("run --config run.json --out a --threads 1", dir);
  ASSERT_EQ(a.code, 0) << a.out;
  const Result b = cli("run --config run.json --out b --threads 3", dir);
  ASSERT_EQ(b.code, 0) << b.out;
  for (const char* f : {"stats.csv", "stationary.csv", "verdicts.json"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const Result c = cli("run --config run.json --out c --seed 4", dir);
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_NE(slurp(dir / "a" / "stats.csv"), slurp(dir / "c" / "stats.csv"));
}

TEST_F(Cli, VerifyBoundSuite) {
  const Result r = cli("verify bound --out v", dir);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "v" / "verdicts.json"));
}

TEST_F(Cli, TransformWritesCurves) {
  write_config(R"({
    "model": {"kind": "sme", "nu": 0.0, "h": {"family": "constant", "c": 0.0}},
    "grid": {"length": 6.283185307179586, "n": 33},
    "initial": {"kind": "great_circle", "amplitude": 1.0},
    "time": {"t_total": 0.05, "sample_stride": 10},
    "scheme": {"dt": "auto"},
    "outputs": {"dir": "tr", "snapshots": true}
  })");
  const Result r = cli("transform --config run.json", dir);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "tr" / "curves.csv"));
  EXPECT_TRUE(fs::exists(dir / "tr" / "hashimoto.csv"));
}
