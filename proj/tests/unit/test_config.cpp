#include <gtest/gtest.h>

#include "fdsme/config.hpp"
#include "fdsme/errors.hpp"

using namespace fdsme;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "model": {"kind": "llg_fluc_diss", "nu": 0.5, "h": {"family": "cosine", "alpha": 0.1, "k": 1}},
    "grid": {"n": 64},
    "scheme": {"kind": "strang_rotation", "dt": 2e-4},
    "time": {"t_burn_in": 1.0, "t_total": 2.0, "sample_stride": 50},
    "ensemble": {"n_trajectories": 4, "master_seed": 7}
  })");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalDefaults) {
  const RunConfig c = parse_config(minimal());
  EXPECT_EQ(c.kind, ModelKind::llg_fluc_diss);
  EXPECT_NEAR(c.length, 2.0 * std::numbers::pi, 1e-15);
  EXPECT_EQ(c.n, 64u);
  EXPECT_EQ(c.n_trajectories, 4u);
  EXPECT_EQ(c.master_seed, 7u);
  EXPECT_TRUE(std::holds_alternative<InitialConstant>(c.initial));
  EXPECT_TRUE(c.checks.enabled.empty());
  EXPECT_TRUE(c.check_enabled("bound"));
}

TEST(Config, AutoValues) {
  json j = minimal();
  j["scheme"]["dt"] = "auto";
  j["time"]["t_burn_in"] = "auto";
  const RunConfig c = parse_config(j);
  EXPECT_TRUE(c.dt_auto);
  EXPECT_TRUE(c.burn_in_auto);
  EXPECT_DOUBLE_EQ(c.scheme.dt, default_dt(c.grid()));
}

TEST(Config, ReportsEveryProblem) {
  json j = minimal();
  j["model"]["nu"] = 2.0;
  j["grid"]["n"] = 2;
  j["scheme"]["dt"] = -1.0;
  j["checks"] = {{"enabled", {"moment_identity", "nonsense"}}};
  const std::string msg = error_of(j);
  EXPECT_NE(msg.find("4 problems"), std::string::npos) << msg;
  for (const char* key : {"model.nu", "grid.n", "scheme.dt", "nonsense"})
    EXPECT_NE(msg.find(key), std::string::npos) << key;
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  json j = minimal();
  j["grid"]["dx"] = 0.1;
  EXPECT_NE(error_of(j).find("dx"), std::string::npos);
  j = minimal();
  j["grid"]["length"] = 6.0;
  EXPECT_NE(error_of(j).find("2 pi k"), std::string::npos);
  j = minimal();
  j["time"]["t_total"] = 0.5;
  EXPECT_NE(error_of(j).find("t_total"), std::string::npos);
  j = minimal();
  j["initial"] = {{"kind", "constant"}, {"q", {0.0, 0.0, 2.0}}};
  EXPECT_NE(error_of(j).find("unit vector"), std::string::npos);
  j = minimal();
  j["model"]["h"] = {{"family", "tabulated"}};
  EXPECT_NE(error_of(j).find("path"), std::string::npos);
  EXPECT_THROW(parse_config(json::array()), ConfigError);
  json no_model = minimal();
  no_model.erase("model");
  EXPECT_NE(error_of(no_model).find("model"), std::string::npos);
}

TEST(Config, SweepList) {
  json j = minimal();
  j["sweep"] = {{"nu", json::array()}};
  EXPECT_NE(error_of(j).find("empty"), std::string::npos);
  j["sweep"]["nu"] = {0.5, 0.5};
  EXPECT_NE(error_of(j).find("decreasing"), std::string::npos);
  j["sweep"]["nu"] = {0.5, 0.25, 0.125};
  EXPECT_EQ(parse_config(j).sweep_nu.size(), 3u);
}

TEST(Config, DigestIgnoresThreadsAndOutput) {
  RunConfig a = parse_config(minimal());
  RunConfig b = a;
  b.threads = 8;
  b.out_dir = "elsewhere";
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.master_seed = 8;
  EXPECT_NE(config_digest(a), config_digest(b));
  EXPECT_EQ(digest_hex(config_digest(a)).size(), 16u);
  // The normalized form parses back to the same configuration.
  EXPECT_EQ(config_digest(parse_config(to_json(a))), config_digest(a));
}
