#include "doctest.h"

#include "uam/errors.hpp"
#include "uam/scenario.hpp"

using namespace uam;

TEST_CASE("defaults carry the table values") {
  Scenario s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.dt == 0.1);
  CHECK(s.q == 5);
  CHECK(s.switching.p_ls == 0.4);
  CHECK(s.airspace.layer_spacing == 100.0);
  CHECK(s.airspace.v_expected[1] == 45.0);
  CHECK(s.airspace.v_expected[2] == 60.0);
  CHECK(s.channel.beta_ref == doctest::Approx(1e-3));
  CHECK(s.protocol.r_omni == 20.0);
  CHECK(s.protocol.r_direct == 40.0);
}

TEST_CASE("parser reads keys, comments and aircraft lines") {
  const auto s = parse_scenario(
      "# demo\n"
      "name = demo\n"
      "sim.dt = 0.05   # finer\n"
      "ris.resolution = pi/6\n"
      "ris_mode = StationaryRis(300, 100)\n"
      "aircraft = 1, 100\n"
      "aircraft = 2, 400, 58\n"
      "sweep.rosters = 5, 30\n");
  CHECK(s.name == "demo");
  CHECK(s.dt == 0.05);
  CHECK(s.resolution.kind == ris::PhaseResolution::Kind::Discrete);
  CHECK(s.resolution.xi == doctest::Approx(1.0 / 6));
  CHECK(s.ris_mode == RisMode::Stationary);
  CHECK(s.stationary_ris_pos.x == 300.0);
  REQUIRE(s.aircraft.size() == 2);
  CHECK(s.aircraft[1].layer == 2);
  CHECK(*s.aircraft[1].v == 58.0);
  CHECK(s.sweep.rosters == std::vector<int>{5, 30});
}

TEST_CASE("parser errors name the line") {
  try {
    parse_scenario("name = x\nbogus.key = 3\n", "f.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("f.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("sim.dt = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("sim.dt = -1\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse_scenario("ris.elements = 12\n").validate(), ConfigError);
}

TEST_CASE("overrides") {
  Scenario s;
  apply_override(s, "switch.p_ls=0");
  CHECK(s.switching.p_ls == 0.0);
  apply_override(s, "seed", "7");
  CHECK(s.seed == 7u);
  CHECK_THROWS_AS(apply_override(s, "nonsense"), ConfigError);
}

TEST_CASE("every builtin scenario loads and validates") {
  const auto names = builtin_scenarios();
  CHECK(names.size() >= 7);
  for (const auto& n : names) {
    CAPTURE(n);
    CHECK_NOTHROW(load_scenario(n).validate());
  }
  CHECK_THROWS_AS(load_scenario("no-such-scenario"), ConfigError);
}

TEST_CASE("interference is wired only in its mode") {
  Scenario s;
  CHECK_FALSE(s.effective_channel().interference.has_value());
  s.ris_mode = RisMode::AirborneWithInterference;
  const auto ch = s.effective_channel();
  REQUIRE(ch.interference.has_value());
  CHECK(ch.interference->pos.x == 800.0);
}
