#include <gtest/gtest.h>

#include "arenakit/domain_string.hpp"
#include "arenakit/rng.hpp"

using namespace arenakit;

namespace {

// Random grammar-valid domain string. Shared with the acceptance
// suite's larger sweep.
std::string random_domain_string(SplitMix64& rng) {
  auto ident = [&](size_t min_len) {
    static const char chars[] = "abcdefghijklmnopqrstuvwxyz0123456789-_";
    size_t len = min_len + rng.next_below(6);
    std::string out;
    for (size_t i = 0; i < len; ++i) out.push_back(chars[rng.next_below(sizeof(chars) - 1)]);
    return out;
  };
  std::string s = ident(1);
  size_t params = rng.next_below(5);
  for (size_t p = 0; p < params; ++p) {
    s += (p == 0 ? "|" : ",");
    s += ident(1) + ":";
    std::string value = ident(1);
    if (rng.next_below(3) == 0) {
      value += "(" + ident(1);
      if (rng.next_below(2) == 0) value += "," + ident(1);
      value += ")";
    }
    s += value;
  }
  return s;
}

}  // namespace

TEST(DomainString, BaseOnly) {
  DomainSpec spec = parse_domain_string("toy");
  EXPECT_EQ(spec.base, "toy");
  EXPECT_TRUE(spec.params.empty());
}

TEST(DomainString, KeyValueList) {
  DomainSpec spec = parse_domain_string("toy|domain:tile-world,horizon:3");
  EXPECT_EQ(spec.base, "toy");
  ASSERT_EQ(spec.params.size(), 2u);
  EXPECT_EQ(spec.param_or("domain", ""), "tile-world");
  EXPECT_EQ(spec.param_or("horizon", ""), "3");
  EXPECT_EQ(spec.param_or("absent", "x"), "x");
}

TEST(DomainString, ParenthesesProtectCommas) {
  DomainSpec spec = parse_domain_string("base|action:pick(1,2),task:flat");
  ASSERT_EQ(spec.params.size(), 2u);
  EXPECT_EQ(spec.param_or("action", ""), "pick(1,2)");
  EXPECT_EQ(spec.param_or("task", ""), "flat");
}

TEST(DomainString, LaterKeysOverride) {
  DomainSpec spec = parse_domain_string("base|disp:True,task:a,disp:False");
  ASSERT_EQ(spec.params.size(), 2u);
  EXPECT_EQ(spec.param_or("disp", ""), "False");
  EXPECT_EQ(spec.params[0].first, "disp");  // position of first occurrence kept
}

TEST(DomainString, ErrorsCarryPosition) {
  for (const char* bad : {"", "|x:y", "base|", "base|key", "base|:v", "base|k:",
                          "base|k:v,", "base|k:v(", "base|k:v)", "base|a,b:c"}) {
    EXPECT_THROW(parse_domain_string(bad), ParseError) << bad;
  }
  try {
    parse_domain_string("base|key");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos);
  }
}

TEST(DomainString, UnparseRoundTrip) {
  SplitMix64 rng(42);
  for (int i = 0; i < 300; ++i) {
    std::string s = random_domain_string(rng);
    DomainSpec spec = parse_domain_string(s);
    EXPECT_EQ(parse_domain_string(unparse_domain_string(spec)), spec) << s;
  }
}

TEST(DomainString, ControlSuiteStyleExample) {
  DomainSpec spec = parse_domain_string("dm_control_suite|domain:walker,task:walk");
  EXPECT_EQ(spec.base, "dm_control_suite");
  ASSERT_EQ(spec.params.size(), 2u);
  EXPECT_EQ(spec.param_or("domain", ""), "walker");
  EXPECT_EQ(spec.param_or("task", ""), "walk");
}

TEST(DomainString, FabricStyleExample) {
  DomainSpec spec = parse_domain_string(
      "softgym|domain:mono-square-fabric,initial:crumpled,"
      "action:pixel-pick-and-place(1),task:flattening");
  EXPECT_EQ(spec.base, "softgym");
  ASSERT_EQ(spec.params.size(), 4u);
  EXPECT_EQ(spec.param_or("domain", ""), "mono-square-fabric");
  EXPECT_EQ(spec.param_or("initial", ""), "crumpled");
  EXPECT_EQ(spec.param_or("action", ""), "pixel-pick-and-place(1)");
  EXPECT_EQ(spec.param_or("task", ""), "flattening");
}

TEST(AgentString, BaseAndVariant) {
  AgentSpec plain = parse_agent_string("tabular-q");
  EXPECT_EQ(plain.base, "tabular-q");
  EXPECT_TRUE(plain.variant.empty());
  AgentSpec with = parse_agent_string("oracle-garment|mask-biased-pick-and-place");
  EXPECT_EQ(with.base, "oracle-garment");
  EXPECT_EQ(with.variant, "mask-biased-pick-and-place");
  EXPECT_THROW(parse_agent_string(""), ParseError);
  EXPECT_THROW(parse_agent_string("|v"), ParseError);
}
