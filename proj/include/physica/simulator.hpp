#pragma once

#include "physica/scene.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace physica {

/// Straight or constant-curvature lane, arc-length parameterized, z = 0.
/// Positive curvature bends left.
struct LaneSpec {
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  double heading = 0.0;  // radians, world frame
  double length = 0.0;   // meters
  double curvature = 0.0;
  double width = 3.5;

  Eigen::Vector2d position(double s) const;
  double tangent_heading(double s) const;
};

struct LaneLayout {
  std::vector<LaneSpec> lanes;

  /// Centerlines ("lane"), shared boundaries ("lane_divider"), and the outer
  /// envelope ("drivable_area_boundary").
  std::vector<MapElement> to_map_elements() const;
};

struct Behavior {
  enum class Kind { kConstantSpeed, kCutIn, kBrake };
  Kind kind = Kind::kConstantSpeed;
  double speed = 0.0;     // constant_speed and cut_in cruise speed
  double t_start = 0.0;   // cut_in / brake trigger, seconds
  double duration = 0.0;  // cut_in maneuver length, seconds
  int target_lane = 0;    // cut_in destination
  double decel = 0.0;     // brake, m/s^2
  double v0 = 0.0;        // brake initial speed
};

struct ActorScript {
  std::uint64_t actor_id = 0;
  std::string class_label = "car";
  Eigen::Vector3d size = Eigen::Vector3d(4.5, 1.9, 1.6);
  int lane = 0;
  double initial_offset = 0.0;  // arc length along the lane at t = 0
  Behavior behavior;
};

struct EgoScript {
  int lane = 0;
  double initial_offset = 0.0;
  std::vector<std::pair<double, double>> speed_profile = {{0.0, 5.0}};  // (t_start, speed)
};

struct Scenario {
  LaneLayout layout;
  EgoScript ego;
  std::vector<ActorScript> actors;
};

/// nuScenes-style six-camera rig (front, front-left/right, back,
/// back-left/right), dimensions divisible by 8.
std::vector<CameraRig> default_rig(int width = 448, int height = 256);

/// Integrates every script at the frame rate with closed-form kinematics and
/// returns a Scene that passes validate_scene with zero fatal violations.
/// Throws ScriptError on unknown lanes, negative trigger times, bad T/rate.
Scene simulate(const LaneLayout& layout, const EgoScript& ego,
               const std::vector<ActorScript>& actors, int num_frames, double rate_hz,
               const std::vector<CameraRig>& rig, std::uint64_t seed,
               const std::string& scene_id = "");

struct ScenarioRanges {
  int min_lanes = 2, max_lanes = 4;
  double lane_width = 3.5;
  double lane_length = 240.0;
  double arc_probability = 0.3;  // otherwise straight; arcs exclude cut-ins
  double max_abs_curvature = 0.01;
  int min_actors = 0, max_actors = 6;
  double min_speed = 0.0, max_speed = 15.0;
  double cut_in_probability = 0.25;
  double brake_probability = 0.25;
  int num_frames = 16;
  double rate_hz = 2.0;
};

/// Deterministic per seed; every behavior kind appears across seeds.
Scenario random_scenario(const ScenarioRanges& ranges, std::uint64_t seed);

/// Smoothstep 3s^2 - 2s^3 on [0, 1]; the cut-in lateral profile.
double smoothstep(double s);

/// Arc length an actor has traveled at time t (closed form, no substeps).
double behavior_arclength(const Behavior& b, double initial_offset, double t);

/// Speed at time t; non-increasing after a brake trigger, never negative.
double behavior_speed(const Behavior& b, double t);

}  // namespace physica
