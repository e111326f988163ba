#include "physica/simulator.hpp"

#include "physica/errors.hpp"
#include "physica/geometry.hpp"
#include "physica/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace physica {

namespace {

Eigen::Vector2d heading_dir(double heading) {
  return {std::cos(heading), std::sin(heading)};
}

Eigen::Vector2d left_normal(double heading) {
  return {-std::sin(heading), std::cos(heading)};
}

constexpr double kBoundarySampleStep = 4.0;  // meters along arcs

std::vector<Eigen::Vector3d> sample_offset_polyline(const LaneSpec& lane, double lateral) {
  std::vector<Eigen::Vector3d> pts;
  int samples = 2;
  if (lane.curvature != 0.0)
    samples = std::max(8, static_cast<int>(std::ceil(lane.length / kBoundarySampleStep)) + 1);
  for (int i = 0; i < samples; ++i) {
    const double s = lane.length * i / (samples - 1);
    const Eigen::Vector2d p =
        lane.position(s) + lateral * left_normal(lane.tangent_heading(s));
    pts.emplace_back(p.x(), p.y(), 0.0);
  }
  return pts;
}

}  // namespace

Eigen::Vector2d LaneSpec::position(double s) const {
  if (curvature == 0.0) return start + s * heading_dir(heading);
  const double r = 1.0 / curvature;
  const Eigen::Vector2d center = start + r * left_normal(heading);
  const double angle = heading + curvature * s;
  return center - r * left_normal(angle);
}

double LaneSpec::tangent_heading(double s) const { return heading + curvature * s; }

std::vector<MapElement> LaneLayout::to_map_elements() const {
  std::vector<MapElement> out;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const LaneSpec& lane = lanes[i];
    out.push_back({"lane", sample_offset_polyline(lane, 0.0)});
    // Outermost boundaries mark the drivable area; interior ones divide lanes.
    const bool first = i == 0, last = i + 1 == lanes.size();
    out.push_back({last ? "drivable_area_boundary" : "lane_divider",
                   sample_offset_polyline(lane, lane.width / 2.0)});
    if (first)
      out.push_back({"drivable_area_boundary", sample_offset_polyline(lane, -lane.width / 2.0)});
  }
  return out;
}

std::vector<CameraRig> default_rig(int width, int height) {
  // Camera yawed by psi in the vehicle frame (x fwd, y left, z up), mapped to
  // camera axes x right, y down, z forward.
  auto make = [&](const std::string& name, double psi_deg, const Eigen::Vector3d& mount) {
    const double psi = psi_deg * std::numbers::pi / 180.0;
    const double c = std::cos(psi), s = std::sin(psi);
    CameraRig rig;
    rig.name = name;
    rig.width = width;
    rig.height = height;
    const double fx = 1266.0 * width / 1600.0;
    rig.K << fx, 0.0, width / 2.0, 0.0, fx, height / 2.0, 0.0, 0.0, 1.0;
    rig.R << s, -c, 0.0,
             0.0, 0.0, -1.0,
             c, s, 0.0;
    rig.T = -(rig.R * mount);
    return rig;
  };
  return {
      make("CAM_FRONT", 0.0, {1.7, 0.0, 1.5}),
      make("CAM_FRONT_LEFT", 55.0, {1.5, 0.5, 1.5}),
      make("CAM_FRONT_RIGHT", -55.0, {1.5, -0.5, 1.5}),
      make("CAM_BACK", 180.0, {0.0, 0.0, 1.6}),
      make("CAM_BACK_LEFT", 125.0, {1.0, 0.5, 1.5}),
      make("CAM_BACK_RIGHT", -125.0, {1.0, -0.5, 1.5}),
  };
}

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

double behavior_speed(const Behavior& b, double t) {
  switch (b.kind) {
    case Behavior::Kind::kConstantSpeed:
    case Behavior::Kind::kCutIn:
      return b.speed;
    case Behavior::Kind::kBrake: {
      if (t <= b.t_start) return b.v0;
      return std::max(0.0, b.v0 - b.decel * (t - b.t_start));
    }
  }
  return 0.0;
}

double behavior_arclength(const Behavior& b, double initial_offset, double t) {
  switch (b.kind) {
    case Behavior::Kind::kConstantSpeed:
    case Behavior::Kind::kCutIn:
      return initial_offset + b.speed * t;
    case Behavior::Kind::kBrake: {
      if (t <= b.t_start) return initial_offset + b.v0 * t;
      const double t_stop = b.t_start + b.v0 / b.decel;
      const double dt = std::min(t, t_stop) - b.t_start;
      return initial_offset + b.v0 * b.t_start + b.v0 * dt - 0.5 * b.decel * dt * dt;
    }
  }
  return initial_offset;
}

Scene simulate(const LaneLayout& layout, const EgoScript& ego,
               const std::vector<ActorScript>& actors, int num_frames, double rate_hz,
               const std::vector<CameraRig>& rig, std::uint64_t seed,
               const std::string& scene_id) {
  if (num_frames < 2) throw ScriptError("need at least 2 frames");
  if (!(rate_hz > 0.0)) throw ScriptError("frame rate must be positive");
  const int lane_count = static_cast<int>(layout.lanes.size());
  auto check_lane = [&](int lane, const char* who) {
    if (lane < 0 || lane >= lane_count)
      throw ScriptError(std::string(who) + " references unknown lane " + std::to_string(lane));
  };
  check_lane(ego.lane, "ego");
  if (ego.speed_profile.empty() || ego.speed_profile.front().first != 0.0)
    throw ScriptError("ego speed profile must start at t = 0");
  for (const auto& [t, v] : ego.speed_profile) {
    if (t < 0.0) throw ScriptError("negative time in ego speed profile");
    if (v < 0.0) throw ScriptError("negative ego speed");
  }
  for (const auto& actor : actors) {
    check_lane(actor.lane, "actor");
    const Behavior& b = actor.behavior;
    if (b.t_start < 0.0) throw ScriptError("negative behavior trigger time");
    switch (b.kind) {
      case Behavior::Kind::kConstantSpeed:
        if (b.speed < 0.0) throw ScriptError("negative actor speed");
        break;
      case Behavior::Kind::kCutIn: {
        if (b.speed < 0.0) throw ScriptError("negative actor speed");
        if (!(b.duration > 0.0)) throw ScriptError("cut_in duration must be positive");
        check_lane(b.target_lane, "cut_in target");
        const LaneSpec& src = layout.lanes[static_cast<std::size_t>(actor.lane)];
        const LaneSpec& dst = layout.lanes[static_cast<std::size_t>(b.target_lane)];
        if (src.curvature != 0.0 || dst.curvature != 0.0 || src.heading != dst.heading)
          throw ScriptError("cut_in requires parallel straight lanes");
        break;
      }
      case Behavior::Kind::kBrake:
        if (!(b.decel > 0.0)) throw ScriptError("brake decel must be positive");
        if (b.v0 < 0.0) throw ScriptError("negative brake initial speed");
        break;
    }
  }

  Scene scene;
  scene.scene_id = scene_id.empty() ? "sim-" + std::to_string(seed) : scene_id;
  scene.frame_rate = rate_hz;
  scene.cameras = rig;
  scene.map = layout.to_map_elements();

  // Piecewise-constant ego speed integrates exactly.
  auto ego_arclength = [&](double t) {
    double s = ego.initial_offset;
    for (std::size_t k = 0; k < ego.speed_profile.size(); ++k) {
      const double seg_start = ego.speed_profile[k].first;
      const double seg_end =
          k + 1 < ego.speed_profile.size() ? ego.speed_profile[k + 1].first : t;
      if (t <= seg_start) break;
      s += ego.speed_profile[k].second * (std::min(t, seg_end) - seg_start);
      if (t <= seg_end) break;
    }
    return s;
  };

  const LaneSpec& ego_lane = layout.lanes[static_cast<std::size_t>(ego.lane)];
  for (int i = 0; i < num_frames; ++i) {
    const double t = i / rate_hz;
    Frame frame;
    frame.index = i;
    frame.timestamp = t;

    const double es = ego_arclength(t);
    const Eigen::Vector2d ep = ego_lane.position(es);
    const double eh = ego_lane.tangent_heading(es);
    frame.ego.rotation_we = yaw_rotation(eh);
    frame.ego.translation_we = Eigen::Vector3d(ep.x(), ep.y(), 0.0);

    for (const auto& actor : actors) {
      const Behavior& b = actor.behavior;
      const LaneSpec& src = layout.lanes[static_cast<std::size_t>(actor.lane)];
      const double s = behavior_arclength(b, actor.initial_offset, t);

      Eigen::Vector2d pos;
      double yaw;
      if (b.kind == Behavior::Kind::kCutIn) {
        const LaneSpec& dst = layout.lanes[static_cast<std::size_t>(b.target_lane)];
        const double u = b.duration > 0.0 ? (t - b.t_start) / b.duration : 1.0;
        const double w = t <= b.t_start ? 0.0 : smoothstep(u);
        const Eigen::Vector2d a = src.position(s);
        const Eigen::Vector2d c = dst.position(s);
        pos = (1.0 - w) * a + w * c;
        // Heading follows the analytic velocity of the blended path.
        const double w_dot = (u > 0.0 && u < 1.0)
                                 ? 6.0 * u * (1.0 - u) / b.duration
                                 : 0.0;
        const Eigen::Vector2d vel =
            b.speed * heading_dir(src.heading) + w_dot * (c - a);
        yaw = vel.norm() > 1e-12 ? std::atan2(vel.y(), vel.x()) : src.heading;
      } else {
        pos = src.position(s);
        yaw = src.tangent_heading(s);
      }

      Instance ins;
      ins.track_id = actor.actor_id;
      ins.class_label = actor.class_label;
      ins.size = actor.size;
      ins.center_world = Eigen::Vector3d(pos.x(), pos.y(), actor.size.z() / 2.0);
      ins.yaw_world = yaw;
      frame.instances.push_back(std::move(ins));
    }
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

Scenario random_scenario(const ScenarioRanges& ranges, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Scenario sc;

  const int lane_count =
      ranges.min_lanes +
      static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(ranges.max_lanes - ranges.min_lanes + 1)));
  const bool arc = rng.next_unit() < ranges.arc_probability;
  const double base_heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double curvature =
      arc ? rng.uniform(-ranges.max_abs_curvature, ranges.max_abs_curvature) : 0.0;

  // Lane i sits i widths to the left of lane 0; arcs stay concentric.
  const Eigen::Vector2d origin(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
  for (int i = 0; i < lane_count; ++i) {
    LaneSpec lane;
    lane.width = ranges.lane_width;
    lane.heading = base_heading;
    lane.length = ranges.lane_length;
    lane.start = origin + i * ranges.lane_width * left_normal(base_heading);
    if (arc) {
      const double r0 = 1.0 / curvature;
      const double ri = r0 - i * ranges.lane_width;
      if (std::abs(ri) < 20.0) {
        lane.curvature = 0.0;  // degenerate radius, fall back to straight
        lane.heading = base_heading;
      } else {
        lane.curvature = 1.0 / ri;
      }
    }
    sc.layout.lanes.push_back(lane);
  }
  const bool layout_straight =
      std::all_of(sc.layout.lanes.begin(), sc.layout.lanes.end(),
                  [](const LaneSpec& l) { return l.curvature == 0.0; });

  sc.ego.lane = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lane_count)));
  sc.ego.initial_offset = rng.uniform(0.0, 30.0);
  sc.ego.speed_profile = {{0.0, rng.uniform(3.0, ranges.max_speed)}};
  if (rng.next_unit() < 0.3) {
    const double horizon = ranges.num_frames / ranges.rate_hz;
    sc.ego.speed_profile.emplace_back(rng.uniform(0.5, horizon * 0.8),
                                      rng.uniform(0.0, ranges.max_speed));
  }

  const int actor_count =
      ranges.min_actors +
      static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(ranges.max_actors - ranges.min_actors + 1)));
  const double horizon = (ranges.num_frames - 1) / ranges.rate_hz;
  for (int a = 0; a < actor_count; ++a) {
    ActorScript actor;
    actor.actor_id = static_cast<std::uint64_t>(a + 1);
    actor.class_label = rng.next_unit() < 0.8 ? "car" : "truck";
    actor.size = actor.class_label == "car" ? Eigen::Vector3d(4.5, 1.9, 1.6)
                                            : Eigen::Vector3d(8.0, 2.5, 3.2);
    actor.lane = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lane_count)));
    actor.initial_offset = rng.uniform(5.0, ranges.lane_length * 0.5);

    const double roll = rng.next_unit();
    if (roll < ranges.cut_in_probability && layout_straight && lane_count > 1) {
      actor.behavior.kind = Behavior::Kind::kCutIn;
      actor.behavior.speed = rng.uniform(std::max(1.0, ranges.min_speed), ranges.max_speed);
      actor.behavior.duration = rng.uniform(1.0, std::min(3.0, horizon * 0.6));
      actor.behavior.t_start =
          rng.uniform(0.0, std::max(0.0, horizon - actor.behavior.duration));
      int target = actor.lane;
      while (target == actor.lane)
        target = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lane_count)));
      actor.behavior.target_lane = target;
    } else if (roll < ranges.cut_in_probability + ranges.brake_probability) {
      actor.behavior.kind = Behavior::Kind::kBrake;
      actor.behavior.v0 = rng.uniform(std::max(2.0, ranges.min_speed), ranges.max_speed);
      actor.behavior.decel = rng.uniform(1.0, 8.0);
      actor.behavior.t_start = rng.uniform(0.0, horizon * 0.5);
    } else {
      actor.behavior.kind = Behavior::Kind::kConstantSpeed;
      actor.behavior.speed = rng.uniform(ranges.min_speed, ranges.max_speed);
      if (rng.next_unit() < 0.15) actor.behavior.speed = 0.0;  // parked
    }
    sc.actors.push_back(std::move(actor));
  }
  return sc;
}

}  // namespace physica
