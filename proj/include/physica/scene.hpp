#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace physica {

/// Object and road class names, in palette order. The set is configurable;
/// defaults follow the nuScenes detection classes and map layers.
struct ClassRegistry {
  std::vector<std::string> object_classes;
  std::vector<std::string> road_classes;

  static const ClassRegistry& defaults();

  bool has_object(const std::string& label) const;
  bool has_road(const std::string& label) const;
  int object_index(const std::string& label) const;  // -1 when unknown
  int road_index(const std::string& label) const;

  bool operator==(const ClassRegistry&) const = default;
};

struct Instance {
  std::uint64_t track_id = 0;
  std::string class_label;
  Eigen::Vector3d center_world = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Zero();  // length, width, height
  double yaw_world = 0.0;                          // about world +z

  bool operator==(const Instance&) const;
};

struct EgoPose {
  Eigen::Matrix3d rotation_we = Eigen::Matrix3d::Identity();  // vehicle -> world
  Eigen::Vector3d translation_we = Eigen::Vector3d::Zero();

  bool operator==(const EgoPose&) const;
};

struct CameraRig {
  std::string name;
  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();  // vehicle -> camera
  Eigen::Vector3d T = Eigen::Vector3d::Zero();
  int width = 0;
  int height = 0;

  bool operator==(const CameraRig&) const;
};

struct MapElement {
  std::string kind;
  std::vector<Eigen::Vector3d> polyline_world;  // length >= 2

  bool operator==(const MapElement&) const;
};

struct Frame {
  std::int64_t index = 0;
  double timestamp = 0.0;  // seconds
  EgoPose ego;
  std::vector<Instance> instances;

  bool operator==(const Frame&) const;
};

struct Scene {
  std::string scene_id;
  double frame_rate = 0.0;  // Hz
  std::vector<CameraRig> cameras;
  std::vector<MapElement> map;
  std::vector<Frame> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int view_count() const { return static_cast<int>(cameras.size()); }

  bool operator==(const Scene&) const;
};

enum class Severity { kError, kWarning };

struct Violation {
  std::string code;      // machine-readable, e.g. "CAM_R_NOT_ORTHONORMAL"
  std::string location;  // JSON-pointer-ish path into the scene
  std::string message;
  Severity severity = Severity::kError;
};

/// Syntax + schema walk only; invariants are not enforced. Throws
/// SyntaxError / SchemaError.
Scene parse_scene_unchecked(const std::string& text,
                            const ClassRegistry& registry = ClassRegistry::defaults());

/// Full parse: schema walk plus invariant check. Throws SyntaxError,
/// SchemaError, or InvariantError (first fatal violation).
Scene parse_scene(const std::string& text,
                  const ClassRegistry& registry = ClassRegistry::defaults());

/// Canonical serialization: sorted keys, shortest-round-trip floats.
/// parse_scene(serialize_scene(s)) == s for every valid scene.
std::string serialize_scene(const Scene& scene);

/// Empty result iff every type invariant holds. Violations are data, not
/// errors; warnings (track continuity) never make a scene invalid.
std::vector<Violation> validate_scene(const Scene& scene,
                                      const ClassRegistry& registry = ClassRegistry::defaults());

inline bool has_fatal(const std::vector<Violation>& vs) {
  for (const auto& v : vs)
    if (v.severity == Severity::kError) return true;
  return false;
}

}  // namespace physica
