#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driveaudit/metrics.hpp"
#include "driveaudit/scenario.hpp"

namespace driveaudit {

// Parameterized scenario families whose metric values are known in closed
// form. Each generated scenario comes with expectations the metric engine
// must reproduce, which makes these the test bed for the analysis pipeline
// and the corpus for batch runs.
enum class SynthKind {
  CarFollowing,       // ego closes on a slower lead in the same lane
  CrossingPaths,      // two vehicles sweep a shared square at distinct times
  CyclistOvertake,    // ego passes a cyclist with a fixed lateral clearance
  CrosswalkApproach,  // ego rolls over a crosswalk with a pedestrian nearby
  SolidLineDrift,     // ego rides offset across a solid lane boundary
  StationaryField,    // parked agents only; no interaction metric applies
};

inline constexpr std::array<SynthKind, 6> kAllSynthKinds = {
  SynthKind::CarFollowing,    SynthKind::CrossingPaths,  SynthKind::CyclistOvertake,
  SynthKind::CrosswalkApproach, SynthKind::SolidLineDrift, SynthKind::StationaryField,
};

std::string_view to_string(SynthKind k);
std::optional<SynthKind> synth_kind_from_string(std::string_view s);

// What the metric engine must produce on a generated scenario. With a
// value: every defined (metric, subject) sample inside the frame range lies
// within tolerance of it, and at least one such sample exists. Without a
// value: no defined sample of that metric for that subject may exist in the
// range.
struct Expectation {
  MetricId metric = MetricId::VEL;
  std::string subject;
  int frame_lo = 0;
  int frame_hi = 0;
  std::optional<double> value;
  double tolerance = 0.0;
};

// Case parameters. Fields are read per kind; the rest are ignored.
struct SynthCase {
  SynthKind kind = SynthKind::CarFollowing;
  std::string scenario_id = "synth-case";

  // car_following: front-to-rear gap shrinking at constant relative speed.
  double initial_gap = 16.0;  // m, lead rear minus ego front at frame 0
  double ego_speed = 10.0;    // m/s
  double lead_speed = 0.0;    // m/s
  double ego_accel = 0.0;     // m/s^2, >= 0

  // crossing_paths: ego leaves the shared square on exit_frame, the
  // crossing vehicle enters it on entry_frame.
  int exit_frame = 30;
  int entry_frame = 45;
  double cross_speed = 8.0;  // m/s of the crossing vehicle

  // cyclist_overtake / crosswalk_approach: edge-to-edge clearance to the
  // cyclist, or ego-edge-to-pedestrian distance at closest approach.
  double lateral_clearance = 1.2;  // m
  double target_speed = 4.0;      // m/s of the overtaken cyclist

  // solid_line_drift: ego center offset from the lane centerline; the
  // solid boundary sits at +1 m, the ego is 2 m wide, so the expected
  // penetration is max(0, offset).
  double line_offset = 0.5;  // m

  int background_agents = 8;  // parked vehicles padding the agent count
  double noise_sigma = 0.0;   // m, optional Gaussian position jitter
  unsigned noise_seed = 0;
};

struct SynthResult {
  Scenario scenario;
  std::vector<Expectation> expectations;
};

// Builds the canonical 11 s / 10 Hz scenario for the case together with its
// expectations. Throws ParameterError naming the offending field when a
// parameter is outside its physical range.
SynthResult generate(const SynthCase& c);

// Compares engine samples against expectations; returns one message per
// violation (empty means everything matched).
std::vector<std::string> check_expectations(const std::vector<MetricSample>& samples,
                                            const std::vector<Expectation>& expectations);

// Serialization of expectations, one JSON object per line carrying
// {scenario_id, metric, subject, frame_range, value, tolerance}.
std::string expectations_to_jsonl(const std::string& scenario_id,
                                  const std::vector<Expectation>& expectations);

struct ScenarioExpectations {
  std::string scenario_id;
  std::vector<Expectation> expectations;
};

std::vector<ScenarioExpectations> expectations_from_jsonl(const std::string& text,
                                                          const std::string& origin);

struct CorpusOptions {
  int count = 10;
  unsigned seed = 0;
  std::optional<SynthKind> kind;  // unset = cycle through all kinds
  double noise_sigma = 0.0;
};

// Draws `count` randomized cases (deterministic for a fixed seed), writes
// one canonical scenario file per case into out_dir plus an expected.jsonl
// manifest, and returns the scenario file names in generation order.
// Throws IoError when out_dir cannot be created or written.
std::vector<std::string> generate_corpus(const std::filesystem::path& out_dir,
                                         const CorpusOptions& options);

// The cases generate_corpus would write, without touching the filesystem.
std::vector<SynthCase> draw_corpus_cases(const CorpusOptions& options);

}  // namespace driveaudit
