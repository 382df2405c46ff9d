#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "arenakit/config.hpp"
#include "arenakit/registry.hpp"

using namespace arenakit;

TEST(Config, ScalarTypesFromYaml) {
  Config c = Config::from_yaml_string(
      "alpha: 0.1\n"
      "steps: 2000\n"
      "name: walker\n"
      "render: True\n"
      "quiet: false\n");
  EXPECT_DOUBLE_EQ(c.get_double("alpha", 0.0), 0.1);
  EXPECT_EQ(c.get_int("steps", 0), 2000);
  EXPECT_EQ(c.get_string("name", ""), "walker");
  EXPECT_TRUE(c.get_bool("render", false));
  EXPECT_FALSE(c.get_bool("quiet", true));
}

TEST(Config, NestedAndFallbacks) {
  Config c = Config::from_yaml_string("trainer:\n  lr: 0.01\n  sched:\n    kind: cosine\n");
  EXPECT_DOUBLE_EQ(c.get_double("trainer.lr", 0.0), 0.01);
  EXPECT_EQ(c.get_string("trainer.sched.kind", ""), "cosine");
  EXPECT_EQ(c.get_int("trainer.missing", -1), -1);
  EXPECT_FALSE(c.get("absent.path"));
}

TEST(Config, EmptyDocument) {
  EXPECT_TRUE(Config::from_yaml_string("").empty());
  EXPECT_TRUE(Config().empty());
}

TEST(Config, SetOverrides) {
  Config c;
  c.set("a.b", Value(2.0));
  EXPECT_DOUBLE_EQ(c.get_double("a.b", 0.0), 2.0);
}

TEST(Config, MissingFileErrors) {
  EXPECT_THROW(Config::from_yaml_file("/nonexistent/cfg.yaml"), ConfigError);
}

TEST(RetrieveConfig, ShippedDefaultHasAlpha) {
  // ARENA_KIT_CONFIG_DIR points at the repo's configs/ in the test env
  Config c = retrieve_config("tabular-q", "toy|domain:line-walker", "default");
  EXPECT_TRUE(c.get("alpha"));
  EXPECT_DOUBLE_EQ(c.get_double("alpha", 0.0), 0.5);
  EXPECT_EQ(c.get_int("total_update_steps", 0), 2000);
}

TEST(RetrieveConfig, EmptyNameGivesEmptyConfig) {
  Config c = retrieve_config("oracle-tile", "toy|domain:tile-world,task:flattening", "");
  EXPECT_TRUE(c.empty());
}

TEST(RetrieveConfig, MissingFileNamesSearchedPath) {
  try {
    retrieve_config("x", "y", "missing");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("x/y/missing.yaml"), std::string::npos) << msg;
  }
}

TEST(RetrieveConfig, KeyedByBaseNames) {
  Config a = retrieve_config("tabular-q", "toy|domain:line-walker,buckets:5", "default");
  Config b = retrieve_config("tabular-q|variant", "toy", "default");
  EXPECT_DOUBLE_EQ(a.get_double("alpha", 0.0), b.get_double("alpha", 0.0));
}
