#pragma once

#include "physica/scene.hpp"
#include "physica/simulator.hpp"

#include <optional>
#include <string>

namespace physica {

/// Parsed scenario config (docs/scenario-format.md). Scripted scenarios carry
/// explicit lanes/ego/actors; random ones carry generator ranges.
struct ScenarioFile {
  bool random = false;
  int frames = 16;
  double rate_hz = 2.0;
  std::vector<CameraRig> rig;
  std::optional<std::uint64_t> seed;  // file-level seed; CLI --seed overrides
  Scenario scenario;                  // scripted mode
  ScenarioRanges ranges;              // random mode
};

/// Throws SyntaxError / SchemaError.
ScenarioFile parse_scenario(const std::string& text);

/// Runs the scenario (drawing a random one first when mode = random) and
/// returns the simulated scene.
Scene run_scenario(const ScenarioFile& file, std::uint64_t seed);

}  // namespace physica
