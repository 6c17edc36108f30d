#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "driveaudit/adapter.hpp"
#include "driveaudit/errors.hpp"
#include "driveaudit/scenario.hpp"
#include "driveaudit/scenario_io.hpp"
#include "driveaudit/standardize.hpp"

using namespace driveaudit;

namespace {


AgentTrack straight_agent(const std::string& id, AgentCategory cat, int frames, double speed) {
  AgentTrack t;
  t.agent_id = id;
  t.category = cat;
  t.length = cat == AgentCategory::Pedestrian ? 0.0 : 4.5;
  t.width = cat == AgentCategory::Pedestrian ? 0.0 : 2.0;
  t.states.resize(frames);
  t.valid.assign(frames, 1);
  for (int f = 0; f < frames; ++f) {
    t.states[f].position = {speed * 0.1 * f, 0.0};
    t.states[f].heading = 0.0;
    t.states[f].speed = speed;
  }
  return t;
}

Scenario minimal_scenario() {
  Scenario s;
  s.meta.scenario_id = "unit-minimal";
  s.meta.dataset_name = "unit";
  s.meta.city = "testville";
  s.meta.frame_rate_hz = 10.0;
  s.frame_count = 110;
  s.agents.push_back(straight_agent("ego", AgentCategory::Ego, 110, 5.0));
  return s;
}

}  // namespace

TEST_CASE("category and style names round-trip; unknown maps to other") {
  CHECK(agent_category_from_string("ego") == AgentCategory::Ego);
  CHECK(agent_category_from_string("bus") == AgentCategory::Bus);
  CHECK(agent_category_from_string("hovercraft") == AgentCategory::Other);
  CHECK(boundary_style_from_string("solid") == BoundaryStyle::Solid);
  CHECK(boundary_style_from_string("??") == BoundaryStyle::Other);
  CHECK(lane_type_from_string("bicycle") == LaneType::Bicycle);
  for (AgentCategory c : {AgentCategory::Ego, AgentCategory::Vehicle, AgentCategory::Bus,
                          AgentCategory::Bicycle, AgentCategory::Pedestrian, AgentCategory::Other}) {
    CHECK(agent_category_from_string(to_string(c)) == c);
  }
}

TEST_CASE("validate: minimal scenario passes, structural breaks throw") {
  validate_scenario(minimal_scenario());

  SUBCASE("no ego") {
    Scenario s = minimal_scenario();
    s.agents[0].category = AgentCategory::Vehicle;
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("two egos") {
    Scenario s = minimal_scenario();
    s.agents.push_back(straight_agent("ego2", AgentCategory::Ego, 110, 3.0));
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("mask length mismatch") {
    Scenario s = minimal_scenario();
    s.agents[0].valid.pop_back();
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("states length mismatch") {
    Scenario s = minimal_scenario();
    s.agents[0].states.pop_back();
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("heading out of range") {
    Scenario s = minimal_scenario();
    s.agents[0].states[3].heading = kPi;  // range is [-pi, pi)
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("vehicle without extent") {
    Scenario s = minimal_scenario();
    s.agents[0].length = 0.0;
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("point pedestrian is fine") {
    Scenario s = minimal_scenario();
    s.agents.push_back(straight_agent("walker", AgentCategory::Pedestrian, 110, 1.0));
    validate_scenario(s);
  }
  SUBCASE("degenerate boundary polyline") {
    Scenario s = minimal_scenario();
    s.boundaries.push_back({"b1", BoundaryStyle::Solid, {{0.0, 0.0}, {0.0005, 0.0}}});
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
  SUBCASE("lane referencing undefined boundary names the lane") {
    Scenario s = minimal_scenario();
    Lane l;
    l.lane_id = "lane-x";
    l.centerline = {{0.0, 0.0}, {10.0, 0.0}};
    l.left_boundary = "missing-boundary";
    l.right_boundary = "also-missing";
    s.lanes.push_back(l);
    try {
      validate_scenario(s);
      FAIL("expected InvariantError");
    } catch (const InvariantError& e) {
      CHECK(std::string(e.what()).find("lane-x") != std::string::npos);
    }
  }
  SUBCASE("self-intersecting crosswalk") {
    Scenario s = minimal_scenario();
    s.crosswalks.push_back({"cw", {{0, 0}, {2, 2}, {2, 0}, {0, 2}}});
    CHECK_THROWS_AS(validate_scenario(s), InvariantError);
  }
}

TEST_CASE("accessors: find and unique ego") {
  Scenario s = minimal_scenario();
  s.agents.push_back(straight_agent("veh-1", AgentCategory::Vehicle, 110, 3.0));
  CHECK(s.find_agent("veh-1") != nullptr);
  CHECK(s.find_agent("nope") == nullptr);
  CHECK(s.ego().agent_id == "ego");
  s.agents[0].category = AgentCategory::Vehicle;
  CHECK_THROWS_AS((void)s.ego(), InvariantError);
}

TEST_CASE("serialization round-trip is byte-identical") {
  Scenario s = minimal_scenario();
  s.boundaries.push_back({"left", BoundaryStyle::Dashed, {{0.0, 2.0}, {60.0, 2.0}}});
  s.boundaries.push_back({"right", BoundaryStyle::Solid, {{0.0, -2.0}, {60.0, -2.0}}});
  Lane lane;
  lane.lane_id = "lane-0";
  lane.centerline = {{0.0, 0.0}, {60.0, 0.0}};
  lane.left_boundary = "left";
  lane.right_boundary = "right";
  s.lanes.push_back(lane);
  s.crosswalks.push_back({"cw-0", {{10, -3}, {14, -3}, {14, 3}, {10, 3}}});
  s.meta.time_of_day = "day";

  const std::string once = serialize_scenario(s);
  const Scenario back = load_scenario_from_string(once, "unit");
  CHECK(serialize_scenario(back) == once);
  CHECK(back.meta.scenario_id == s.meta.scenario_id);
  CHECK(back.lanes.size() == 1);
  CHECK(back.boundaries.size() == 2);
  CHECK(back.crosswalks.size() == 1);
}

TEST_CASE("loader normalizes headings into [-pi, pi)") {
  Scenario s = minimal_scenario();
  nlohmann::json doc = nlohmann::json::parse(serialize_scenario(s));
  doc["agents"][0]["states"][0][2] = 3.0 * kPi / 2.0;  // -> -pi/2
  const Scenario back = load_scenario_from_string(doc.dump(), "unit");
  CHECK(back.agents[0].states[0].heading == doctest::Approx(-kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("loader rejects malformed and mistyped input with located errors") {
  CHECK_THROWS_AS((void)load_scenario_from_string("{ not json", "unit"), ParseError);

  Scenario s = minimal_scenario();
  nlohmann::json doc = nlohmann::json::parse(serialize_scenario(s));
  SUBCASE("missing meta field") {
    doc["meta"].erase("scenario_id");
    CHECK_THROWS_AS((void)load_scenario_from_string(doc.dump(), "unit"), SchemaError);
  }
  SUBCASE("bad state arity") {
    doc["agents"][0]["states"][5] = {1.0, 2.0};
    CHECK_THROWS_AS((void)load_scenario_from_string(doc.dump(), "unit"), SchemaError);
  }
  SUBCASE("unknown format version") {
    doc["format_version"] = 99;
    CHECK_THROWS_AS((void)load_scenario_from_string(doc.dump(), "unit"), SchemaError);
  }
  SUBCASE("lane to undefined boundary surfaces as invariant violation") {
    doc["map"]["boundaries"] = nlohmann::json::array();
    doc["map"]["lanes"] = nlohmann::json::array();
    doc["map"]["lanes"].push_back({{"lane_id", "l0"},
                                   {"lane_type", "normal"},
                                   {"centerline", {{0.0, 0.0}, {5.0, 0.0}}},
                                   {"left_boundary", "ghost"},
                                   {"right_boundary", "ghost"},
                                   {"predecessors", nlohmann::json::array()},
                                   {"successors", nlohmann::json::array()},
                                   {"neighbors", nlohmann::json::array()}});
    CHECK_THROWS_AS((void)load_scenario_from_string(doc.dump(), "unit"), InvariantError);
  }
}

TEST_CASE("invalid frames serialize zeroed, with null speed") {
  Scenario s = minimal_scenario();
  s.agents[0].valid[7] = 0;
  s.agents[0].states[7].position = {123.0, 456.0};
  s.agents[0].states[7].speed = 9.0;
  const std::string text = serialize_scenario(s);
  const nlohmann::json doc = nlohmann::json::parse(text);
  CHECK(doc["agents"][0]["states"][7][0] == 0.0);
  CHECK(doc["agents"][0]["states"][7][1] == 0.0);
  CHECK(doc["agents"][0]["states"][7][3].is_null());
  CHECK(serialize_scenario(load_scenario_from_string(text, "unit")) == text);
}

TEST_CASE("resample: 20 Hz to 10 Hz keeps every other sample") {
  Scenario s;
  s.meta.scenario_id = "unit-20hz";
  s.meta.dataset_name = "unit";
  s.meta.city = "t";
  s.meta.frame_rate_hz = 20.0;
  s.frame_count = 220;
  AgentTrack ego;
  ego.agent_id = "ego";
  ego.category = AgentCategory::Ego;
  ego.length = 4.0;
  ego.width = 2.0;
  ego.states.resize(220);
  ego.valid.assign(220, 1);
  for (int f = 0; f < 220; ++f) {
    ego.states[f].position = {3.0 * f / 20.0, 0.5};
    ego.states[f].heading = 0.0;
    ego.states[f].speed = 3.0;
  }
  s.agents.push_back(ego);

  const Scenario r = resample_scenario(s, 10.0, 11.0);
  CHECK(r.frame_count == 110);
  CHECK(r.meta.frame_rate_hz == 10.0);
  for (int f = 0; f < 110; ++f) {
    REQUIRE(r.agents[0].is_valid(f));
    CHECK(r.agents[0].states[f].position.x ==
          doctest::Approx(s.agents[0].states[2 * f].position.x).epsilon(1e-9));
    CHECK(r.agents[0].states[f].position.y == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("resample: no extrapolation past an agent's observed span") {
  Scenario s = minimal_scenario();
  for (int f = 50; f < 110; ++f) s.agents[0].valid[f] = 0;
  s.agents.push_back(straight_agent("veh", AgentCategory::Vehicle, 110, 2.0));
  const Scenario r = resample_scenario(s, 10.0, 11.0);
  const AgentTrack* ego = r.find_agent("ego");
  REQUIRE(ego != nullptr);
  for (int f = 0; f < 50; ++f) CHECK(ego->is_valid(f));
  for (int f = 50; f < 110; ++f) CHECK_FALSE(ego->is_valid(f));
}

TEST_CASE("resample: heading interpolates on the circle, not through zero") {
  // 5 Hz input; output frame 21 (t = 2.1 s) falls midway between input
  // frames 10 and 11 carrying headings -3.1 and +3.1.
  Scenario s;
  s.meta.scenario_id = "unit-heading";
  s.meta.dataset_name = "unit";
  s.meta.city = "t";
  s.meta.frame_rate_hz = 5.0;
  s.frame_count = 55;
  AgentTrack ego;
  ego.agent_id = "ego";
  ego.category = AgentCategory::Ego;
  ego.length = 4.0;
  ego.width = 2.0;
  ego.states.resize(55);
  ego.valid.assign(55, 1);
  for (int f = 0; f < 55; ++f) {
    ego.states[f].position = {static_cast<double>(f), 0.0};
    ego.states[f].heading = f <= 10 ? -3.1 : 3.1;
    ego.states[f].speed = 5.0;
  }
  s.agents.push_back(ego);

  const Scenario r = resample_scenario(s, 10.0, 11.0);
  const double h = r.agents[0].states[21].heading;
  CHECK(std::abs(kPi - std::abs(h)) < 0.05);

  // Independent check: average of the two unit heading vectors.
  const double ref = std::atan2(std::sin(-3.1) + std::sin(3.1), std::cos(-3.1) + std::cos(3.1));
  const double diff = std::remainder(h - ref, 2.0 * kPi);
  CHECK(std::abs(diff) < 1e-6);
}

TEST_CASE("resample: idempotent at the canonical grid") {
  Scenario s = minimal_scenario();
  for (int f = 0; f < 110; ++f) {
    s.agents[0].states[f].position = {0.3 * f, std::sin(0.05 * f)};
  }
  const Scenario once = resample_scenario(s, 10.0, 11.0);
  const Scenario twice = resample_scenario(once, 10.0, 11.0);
  REQUIRE(once.frame_count == twice.frame_count);
  for (int f = 0; f < once.frame_count; ++f) {
    CHECK(once.agents[0].is_valid(f) == twice.agents[0].is_valid(f));
    if (once.agents[0].is_valid(f)) {
      CHECK(std::abs(once.agents[0].states[f].position.x -
                     twice.agents[0].states[f].position.x) <= 1e-12);
      CHECK(std::abs(once.agents[0].states[f].position.y -
                     twice.agents[0].states[f].position.y) <= 1e-12);
    }
  }
}

TEST_CASE("resample: scenario with no usable track throws") {
  Scenario s = minimal_scenario();
  s.agents[0].valid.assign(110, 0);
  s.agents[0].valid[3] = 1;  // one valid frame is not enough
  CHECK_THROWS_AS((void)resample_scenario(s, 10.0, 11.0), EmptyScenarioError);
}

TEST_CASE("crop: generous radius is the identity, far elements go") {
  Scenario s = minimal_scenario();
  s.boundaries.push_back({"near-b", BoundaryStyle::Solid, {{0.0, 5.0}, {50.0, 5.0}}});
  Lane near;
  near.lane_id = "near";
  near.centerline = {{0.0, 0.0}, {50.0, 0.0}};
  near.left_boundary = "near-b";
  near.right_boundary = "near-b";
  near.neighbors = {"far"};
  Lane far;
  far.lane_id = "far";
  far.centerline = {{0.0, 500.0}, {50.0, 500.0}};
  far.left_boundary = "near-b";
  far.right_boundary = "near-b";
  far.neighbors = {"near"};
  s.lanes = {near, far};
  s.crosswalks.push_back({"cw-far", {{0, 400}, {4, 400}, {4, 404}, {0, 404}}});

  const Scenario same = crop_map(s, 1e9);
  CHECK(serialize_scenario(same) == serialize_scenario(s));

  const Scenario cropped = crop_map(s, 150.0);
  CHECK(cropped.find_lane("near") != nullptr);
  CHECK(cropped.find_lane("far") == nullptr);
  CHECK(cropped.crosswalks.empty());
  REQUIRE(cropped.lanes.size() == 1);
  CHECK(cropped.lanes[0].neighbors.empty());  // reference to dropped lane pruned
  CHECK(cropped.agents.size() == s.agents.size());
}

TEST_CASE("crop: the 150 m boundary is inclusive") {
  Scenario s = minimal_scenario();
  // Ego stays on x in [0, 54.5]; the nearest approach to each boundary is
  // from the track end at (54.5, 0).
  const double x_end = 54.5;
  s.boundaries.push_back({"at-14999", BoundaryStyle::Solid,
                          {{x_end + 149.99, 0.0}, {x_end + 160.0, 0.0}}});
  s.boundaries.push_back({"at-15001", BoundaryStyle::Solid,
                          {{x_end + 150.01, 10.0}, {x_end + 160.0, 10.0}}});
  const Scenario cropped = crop_map(s, 150.0);
  CHECK(cropped.find_boundary("at-14999") != nullptr);
  CHECK(cropped.find_boundary("at-15001") == nullptr);
}

TEST_CASE("fill_missing_speeds: forward difference, run-end copy, singleton zero") {
  Scenario s = minimal_scenario();
  AgentTrack t = straight_agent("veh", AgentCategory::Vehicle, 110, 4.0);
  for (auto& st : t.states) st.speed.reset();
  t.valid.assign(110, 0);
  for (int f = 10; f <= 20; ++f) t.valid[f] = 1;
  t.valid[40] = 1;  // singleton
  s.agents.push_back(t);
  fill_missing_speeds(s);
  const AgentTrack& v = *s.find_agent("veh");
  for (int f = 10; f < 20; ++f) {
    REQUIRE(v.states[f].speed.has_value());
    CHECK(*v.states[f].speed == doctest::Approx(4.0).epsilon(1e-9));
  }
  CHECK(*v.states[20].speed == doctest::Approx(*v.states[19].speed));
  CHECK(*v.states[40].speed == 0.0);
  // Stored speeds elsewhere untouched.
  CHECK(*s.agents[0].states[0].speed == 5.0);
}

// --- row-table ingestion ----------------------------------------------------

namespace {

TabularScenario base_table(int frames = 110) {
  TabularScenario in;
  in.meta.scenario_id = "unit-tabular";
  in.meta.dataset_name = "unit";
  in.meta.city = "t";
  in.meta.frame_rate_hz = 10.0;
  in.frame_count = frames;
  in.agents["ego"] = {AgentCategory::Ego, 4.5, 2.0};
  return in;
}

}  // namespace

TEST_CASE("tabular: headings estimated from travel direction") {
  TabularScenario in = base_table();
  for (int f = 0; f < 110; ++f) {
    in.rows.push_back({"ego", f, 0.0, 0.4 * f, std::nullopt, std::nullopt});
  }
  const Scenario s = from_tabular(in);
  for (int f = 0; f < 110; ++f) {
    CHECK(s.agents[0].states[f].heading == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("tabular: stationary stretches carry the last known orientation") {
  TabularScenario in = base_table();
  // Stationary (frames 0-9), drive along -x (10-19), stationary again.
  for (int f = 0; f < 110; ++f) {
    double x = 0.0;
    if (f >= 10 && f < 20) x = -0.5 * (f - 9);
    if (f >= 20) x = -5.0;
    in.rows.push_back({"ego", f, x, 0.0, std::nullopt, std::nullopt});
  }
  const Scenario s = from_tabular(in);
  // Before any movement: default orientation 0.
  for (int f = 0; f < 9; ++f) CHECK(s.agents[0].states[f].heading == 0.0);
  // While moving and ever after: the -x direction. (Frame 9's nearest pair
  // already spans the first moving step.)
  for (int f = 10; f < 110; ++f) {
    CHECK(std::abs(std::abs(s.agents[0].states[f].heading) - kPi) < 1e-9);
  }
}

TEST_CASE("tabular: sub-centimeter jitter does not steer the heading") {
  TabularScenario in = base_table();
  for (int f = 0; f < 110; ++f) {
    // Drive +x for 30 frames, then creep by 0.4 mm/frame sideways.
    const double x = f < 30 ? 0.6 * f : 0.6 * 29;
    const double y = f < 30 ? 0.0 : 0.0004 * (f - 29);
    in.rows.push_back({"ego", f, x, y, std::nullopt, std::nullopt});
  }
  const Scenario s = from_tabular(in);
  for (int f = 35; f < 100; ++f) {
    CHECK(s.agents[0].states[f].heading == doctest::Approx(0.0));  // carried, not pi/2
  }
}

TEST_CASE("tabular: provided headings and speeds are kept, absent speeds filled") {
  TabularScenario in = base_table();
  for (int f = 0; f < 110; ++f) {
    TabularRow r{"ego", f, 1.0 * f, 0.0, std::nullopt, std::nullopt};
    if (f == 5) r.heading = 3.0 * kPi / 2.0;  // normalized to -pi/2
    if (f == 6) r.speed = 42.0;
    in.rows.push_back(r);
  }
  const Scenario s = from_tabular(in);
  CHECK(s.agents[0].states[5].heading == doctest::Approx(-kPi / 2.0));
  CHECK(s.agents[0].states[4].heading == doctest::Approx(0.0));
  CHECK(*s.agents[0].states[6].speed == 42.0);
  CHECK(*s.agents[0].states[0].speed == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("tabular: missing frames stay invalid; nearest pair bridges gaps") {
  TabularScenario in = base_table();
  for (int f = 0; f < 110; f += 2) {
    in.rows.push_back({"ego", f, 0.3 * f, 0.0, std::nullopt, std::nullopt});
  }
  const Scenario s = from_tabular(in);
  for (int f = 0; f < 110; ++f) CHECK(s.agents[0].is_valid(f) == (f % 2 == 0));
  CHECK(s.agents[0].states[54].heading == doctest::Approx(0.0));
}

TEST_CASE("tabular: agents come out sorted by id") {
  TabularScenario in = base_table();
  in.agents["zeta"] = {AgentCategory::Vehicle, 4.0, 1.8};
  in.agents["alpha"] = {AgentCategory::Vehicle, 4.0, 1.8};
  for (int f = 0; f < 110; ++f) {
    for (const char* id : {"zeta", "ego", "alpha"}) {
      in.rows.push_back({id, f, 1.0 * f, id[0] * 1.0, std::nullopt, std::nullopt});
    }
  }
  const Scenario s = from_tabular(in);
  REQUIRE(s.agents.size() == 3);
  CHECK(s.agents[0].agent_id == "alpha");
  CHECK(s.agents[1].agent_id == "ego");
  CHECK(s.agents[2].agent_id == "zeta");
}

TEST_CASE("tabular: malformed tables are rejected") {
  SUBCASE("unknown agent") {
    TabularScenario in = base_table();
    in.rows.push_back({"ghost", 0, 0.0, 0.0, std::nullopt, std::nullopt});
    CHECK_THROWS_AS((void)from_tabular(in), SchemaError);
  }
  SUBCASE("frame out of range") {
    TabularScenario in = base_table();
    in.rows.push_back({"ego", 110, 0.0, 0.0, std::nullopt, std::nullopt});
    CHECK_THROWS_AS((void)from_tabular(in), SchemaError);
  }
  SUBCASE("duplicate row") {
    TabularScenario in = base_table();
    in.rows.push_back({"ego", 3, 0.0, 0.0, std::nullopt, std::nullopt});
    in.rows.push_back({"ego", 3, 1.0, 0.0, std::nullopt, std::nullopt});
    CHECK_THROWS_AS((void)from_tabular(in), SchemaError);
  }
  SUBCASE("nonpositive frame count") {
    TabularScenario in = base_table(0);
    CHECK_THROWS_AS((void)from_tabular(in), SchemaError);
  }
}
