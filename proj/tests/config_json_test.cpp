#include "glde/config_json.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

#include "glde/propagator.hpp"
#include "glde/testkit.hpp"

using namespace glde;

namespace {

json valid_config() {
  json j;
  j["dimension"] = 1;
  j["period"] = 1.0;
  j["A"]["density"]["breakpoints"] = {0.0, 1.0};
  j["A"]["density"]["cells"] = json::array({json::array({json::array({json::array({-1.0})})})});
  j["A"]["jumps"] = json::array();
  return j;
}

}  // namespace

TEST(ConfigJson, RoundTripReproducesDynamicsExactly) {
  std::mt19937 rng(81);
  GLDESystem sys = testkit::random_system(rng, 3, true, false);
  std::string text = canonical_dump(config_json(sys));
  GLDESystem back = make_system(parse_config_text(text));
  // 17 significant digits round-trip doubles, so the rebuilt system runs
  // the same arithmetic
  EXPECT_EQ((Propagator(sys).monodromy() - Propagator(back).monodromy()).norm(), 0.0);
  EXPECT_EQ(canonical_dump(config_json(back)), text);
}

TEST(ConfigJson, CanonicalDumpIsOrderIndependent) {
  json a;
  a["zeta"] = 1;
  a["alpha"] = json::array({1.0, 2.0});
  a["mid"]["y"] = 0.1;
  a["mid"]["x"] = true;
  json b;
  b["mid"]["x"] = true;
  b["mid"]["y"] = 0.1;
  b["alpha"] = json::array({1.0, 2.0});
  b["zeta"] = 1;
  EXPECT_EQ(canonical_dump(a), canonical_dump(b));
  // keys come out sorted and floats carry 17 significant digits
  EXPECT_EQ(canonical_dump(a),
            "{\"alpha\":[1,2],\"mid\":{\"x\":true,\"y\":0.10000000000000001},\"zeta\":1}");
}

TEST(ConfigJson, ParsesMinimalHomogeneousSystem) {
  ParsedConfig pc = parse_config(valid_config());
  EXPECT_EQ(pc.dimension, 1);
  EXPECT_EQ(pc.period, 1.0);
  EXPECT_FALSE(pc.f.has_value());
  GLDESystem sys = make_system(std::move(pc));
  EXPECT_NEAR(Propagator(sys).monodromy()(0, 0), std::exp(-1.0), 1e-13);
}

TEST(ConfigJson, RejectsMalformedConfigs) {
  EXPECT_THROW(parse_config_text("not json at all"), config_error);
  EXPECT_THROW(parse_config(json::array()), config_error);

  json j = valid_config();
  j.erase("dimension");
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["dimension"] = 0;
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["period"] = -2.0;
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["A"]["density"]["breakpoints"] = {0.0, 0.4};  // does not span the period
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["A"]["density"]["breakpoints"] = {0.0, 0.5, 0.4, 1.0};
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["A"]["density"]["cells"].push_back(j["A"]["density"]["cells"][0]);  // extra cell
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["A"]["jumps"] = json::array({{{"time", 0.5}, {"pre", json::array({json::array({0.0})})}}});
  EXPECT_THROW(parse_config(j), config_error);  // missing "post"

  j = valid_config();
  j["dimension"] = 2;  // matrices are 1x1 but dimension says 2
  EXPECT_THROW(parse_config(j), config_error);

  j = valid_config();
  j["f"] = json::object();
  EXPECT_THROW(parse_config(j), config_error);  // f without density
}

TEST(ConfigJson, ConditionViolationIsNotAParseError) {
  json j = valid_config();
  j["A"]["jumps"] = json::array(
      {{{"time", 0.5}, {"pre", json::array({json::array({0.0})})},
        {"post", json::array({json::array({-1.0})})}}});
  ParsedConfig pc = parse_config(j);  // parsing succeeds
  EXPECT_FALSE(check_H(pc.A).pass);
  EXPECT_THROW(make_system(std::move(pc)), h_violation_error);
}

TEST(ConfigJson, MissingFileReported) {
  EXPECT_THROW(load_config_file("/nonexistent/glde.json"), config_error);
}

TEST(ConfigJson, ForcedRoundTripKeepsJumpStructure) {
  std::mt19937 rng(82);
  GLDESystem sys = testkit::random_system(rng, 2, true, true);
  ASSERT_TRUE(sys.hasForcing());
  ParsedConfig pc = parse_config_text(canonical_dump(config_json(sys)));
  ASSERT_TRUE(pc.f.has_value());
  EXPECT_EQ(pc.A.jumps().size(), sys.A().jumps().size());
  EXPECT_EQ(pc.f->jumps().size(), sys.f().jumps().size());
  EXPECT_EQ((pc.f->baseValue() - sys.f().baseValue()).norm(), 0.0);
}
