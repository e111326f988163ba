#include "physica/scene.hpp"

#include "physica/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace physica {

using json = nlohmann::json;

namespace {

constexpr double kOrthoTol = 1e-9;

const char* kFormatTag = "physica-scene/1";

struct PathError {
  static SchemaError missing(const std::string& path, const std::string& key) {
    return SchemaError("missing field \"" + key + "\"", path);
  }
  static SchemaError extra(const std::string& path, const std::string& key) {
    return SchemaError("unexpected field \"" + key + "\"", path);
  }
  static SchemaError type(const std::string& path, const std::string& want) {
    return SchemaError("wrong type, expected " + want, path);
  }
};

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw PathError::missing(path, key);
  return *it;
}

void reject_extras(const json& obj, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) throw PathError::extra(path, it.key());
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw PathError::type(path, "number");
  return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw PathError::type(path, "integer");
  return j.get<std::int64_t>();
}

std::uint64_t as_unsigned(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw PathError::type(path, "unsigned integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw PathError::type(path, "string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw PathError::type(path, "array");
  return j;
}

const json& as_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw PathError::type(path, "object");
  return j;
}

Eigen::Vector3d parse_vec3(const json& j, const std::string& path) {
  as_array(j, path);
  if (j.size() != 3) throw PathError::type(path, "array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = as_number(j[i], path + "/" + std::to_string(i));
  return v;
}

// Matrices travel as flat row-major arrays of 9 numbers.
Eigen::Matrix3d parse_mat3(const json& j, const std::string& path) {
  as_array(j, path);
  if (j.size() != 9) throw PathError::type(path, "array of 9 numbers");
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i)
    m(i / 3, i % 3) = as_number(j[i], path + "/" + std::to_string(i));
  return m;
}

json dump_vec3(const Eigen::Vector3d& v) {
  return json::array({v[0], v[1], v[2]});
}

json dump_mat3(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int i = 0; i < 9; ++i) a.push_back(m(i / 3, i % 3));
  return a;
}

bool orthonormal(const Eigen::Matrix3d& r) {
  const Eigen::Matrix3d gram = r.transpose() * r;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kOrthoTol) return false;
  return std::abs(r.determinant() - 1.0) <= kOrthoTol;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

void check_finite(const Scene& scene, std::vector<Violation>& out) {
  auto flag = [&](const std::string& loc) {
    out.push_back({"VALUE_NOT_FINITE", loc, "non-finite value", Severity::kError});
  };
  if (!std::isfinite(scene.frame_rate)) flag("/frame_rate");
  for (std::size_t c = 0; c < scene.cameras.size(); ++c) {
    const auto& cam = scene.cameras[c];
    const std::string base = "/cameras/" + std::to_string(c);
    if (!all_finite(cam.K) || !all_finite(cam.R) || !all_finite(cam.T)) flag(base);
  }
  for (std::size_t e = 0; e < scene.map.size(); ++e)
    for (const auto& p : scene.map[e].polyline_world)
      if (!all_finite(p)) { flag("/map/" + std::to_string(e)); break; }
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    const std::string base = "/frames/" + std::to_string(f);
    const auto& fr = scene.frames[f];
    if (!std::isfinite(fr.timestamp)) flag(base + "/timestamp");
    if (!all_finite(fr.ego.rotation_we) || !all_finite(fr.ego.translation_we))
      flag(base + "/ego");
    for (std::size_t i = 0; i < fr.instances.size(); ++i) {
      const auto& ins = fr.instances[i];
      if (!all_finite(ins.center_world) || !all_finite(ins.size) ||
          !std::isfinite(ins.yaw_world))
        flag(base + "/instances/" + std::to_string(i));
    }
  }
}

}  // namespace

const ClassRegistry& ClassRegistry::defaults() {
  // The source paper counts "10 object classes and 10 road classes" without
  // naming them; these defaults follow the nuScenes detection classes and map
  // layers and are configurable.
  static const ClassRegistry reg{
      {"car", "truck", "bus", "trailer", "construction_vehicle", "pedestrian",
       "motorcycle", "bicycle", "traffic_cone", "barrier"},
      {"lane", "lane_divider", "road_divider", "drivable_area_boundary",
       "crosswalk", "walkway", "stop_line", "carpark_area", "road_segment",
       "traffic_island"}};
  return reg;
}

bool ClassRegistry::has_object(const std::string& label) const {
  return object_index(label) >= 0;
}

bool ClassRegistry::has_road(const std::string& label) const {
  return road_index(label) >= 0;
}

int ClassRegistry::object_index(const std::string& label) const {
  auto it = std::find(object_classes.begin(), object_classes.end(), label);
  return it == object_classes.end() ? -1 : static_cast<int>(it - object_classes.begin());
}

int ClassRegistry::road_index(const std::string& label) const {
  auto it = std::find(road_classes.begin(), road_classes.end(), label);
  return it == road_classes.end() ? -1 : static_cast<int>(it - road_classes.begin());
}

bool Instance::operator==(const Instance& o) const {
  return track_id == o.track_id && class_label == o.class_label &&
         center_world == o.center_world && size == o.size && yaw_world == o.yaw_world;
}

bool EgoPose::operator==(const EgoPose& o) const {
  return rotation_we == o.rotation_we && translation_we == o.translation_we;
}

bool CameraRig::operator==(const CameraRig& o) const {
  return name == o.name && K == o.K && R == o.R && T == o.T && width == o.width &&
         height == o.height;
}

bool MapElement::operator==(const MapElement& o) const {
  return kind == o.kind && polyline_world == o.polyline_world;
}

bool Frame::operator==(const Frame& o) const {
  return index == o.index && timestamp == o.timestamp && ego == o.ego &&
         instances == o.instances;
}

bool Scene::operator==(const Scene& o) const {
  return scene_id == o.scene_id && frame_rate == o.frame_rate && cameras == o.cameras &&
         map == o.map && frames == o.frames;
}

Scene parse_scene_unchecked(const std::string& text, const ClassRegistry&) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Recover line/column from the byte offset nlohmann reports.
    std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    byte = std::min(byte, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
    throw SyntaxError(e.what(), line, col);
  }

  const std::string root = "/";
  as_object(doc, root);
  reject_extras(doc, root, {"format", "scene_id", "frame_rate", "cameras", "map", "frames"});

  const std::string format = as_string(require(doc, root, "format"), "/format");
  if (format != kFormatTag)
    throw SchemaError("unsupported format \"" + format + "\"", "/format");

  Scene scene;
  scene.scene_id = as_string(require(doc, root, "scene_id"), "/scene_id");
  scene.frame_rate = as_number(require(doc, root, "frame_rate"), "/frame_rate");

  const json& cams = as_array(require(doc, root, "cameras"), "/cameras");
  for (std::size_t c = 0; c < cams.size(); ++c) {
    const std::string base = "/cameras/" + std::to_string(c);
    const json& jc = as_object(cams[c], base);
    reject_extras(jc, base, {"name", "K", "R", "T", "width", "height"});
    CameraRig rig;
    rig.name = as_string(require(jc, base, "name"), base + "/name");
    rig.K = parse_mat3(require(jc, base, "K"), base + "/K");
    rig.R = parse_mat3(require(jc, base, "R"), base + "/R");
    rig.T = parse_vec3(require(jc, base, "T"), base + "/T");
    rig.width = static_cast<int>(as_integer(require(jc, base, "width"), base + "/width"));
    rig.height = static_cast<int>(as_integer(require(jc, base, "height"), base + "/height"));
    scene.cameras.push_back(std::move(rig));
  }

  const json& map = as_array(require(doc, root, "map"), "/map");
  for (std::size_t e = 0; e < map.size(); ++e) {
    const std::string base = "/map/" + std::to_string(e);
    const json& je = as_object(map[e], base);
    reject_extras(je, base, {"kind", "points"});
    MapElement elem;
    elem.kind = as_string(require(je, base, "kind"), base + "/kind");
    const json& pts = as_array(require(je, base, "points"), base + "/points");
    for (std::size_t p = 0; p < pts.size(); ++p)
      elem.polyline_world.push_back(parse_vec3(pts[p], base + "/points/" + std::to_string(p)));
    scene.map.push_back(std::move(elem));
  }

  const json& frames = as_array(require(doc, root, "frames"), "/frames");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string base = "/frames/" + std::to_string(f);
    const json& jf = as_object(frames[f], base);
    reject_extras(jf, base, {"index", "timestamp", "ego", "instances"});
    Frame frame;
    frame.index = as_integer(require(jf, base, "index"), base + "/index");
    frame.timestamp = as_number(require(jf, base, "timestamp"), base + "/timestamp");

    const std::string ego_path = base + "/ego";
    const json& jego = as_object(require(jf, base, "ego"), ego_path);
    reject_extras(jego, ego_path, {"rotation", "translation"});
    frame.ego.rotation_we = parse_mat3(require(jego, ego_path, "rotation"), ego_path + "/rotation");
    frame.ego.translation_we =
        parse_vec3(require(jego, ego_path, "translation"), ego_path + "/translation");

    const json& jins = as_array(require(jf, base, "instances"), base + "/instances");
    for (std::size_t i = 0; i < jins.size(); ++i) {
      const std::string ibase = base + "/instances/" + std::to_string(i);
      const json& ji = as_object(jins[i], ibase);
      reject_extras(ji, ibase, {"track_id", "class", "center", "size", "yaw"});
      Instance ins;
      ins.track_id = as_unsigned(require(ji, ibase, "track_id"), ibase + "/track_id");
      ins.class_label = as_string(require(ji, ibase, "class"), ibase + "/class");
      ins.center_world = parse_vec3(require(ji, ibase, "center"), ibase + "/center");
      ins.size = parse_vec3(require(ji, ibase, "size"), ibase + "/size");
      ins.yaw_world = as_number(require(ji, ibase, "yaw"), ibase + "/yaw");
      frame.instances.push_back(std::move(ins));
    }
    scene.frames.push_back(std::move(frame));
  }

  return scene;
}

Scene parse_scene(const std::string& text, const ClassRegistry& registry) {
  Scene scene = parse_scene_unchecked(text, registry);
  const auto violations = validate_scene(scene, registry);
  for (const auto& v : violations) {
    if (v.severity == Severity::kError)
      throw InvariantError(v.message + " (" + v.code + " at " + v.location + ")", v.code);
  }
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  json doc;  // nlohmann objects keep keys sorted
  doc["format"] = kFormatTag;
  doc["scene_id"] = scene.scene_id;
  doc["frame_rate"] = scene.frame_rate;

  json cams = json::array();
  for (const auto& rig : scene.cameras) {
    json jc;
    jc["name"] = rig.name;
    jc["K"] = dump_mat3(rig.K);
    jc["R"] = dump_mat3(rig.R);
    jc["T"] = dump_vec3(rig.T);
    jc["width"] = rig.width;
    jc["height"] = rig.height;
    cams.push_back(std::move(jc));
  }
  doc["cameras"] = std::move(cams);

  json map = json::array();
  for (const auto& elem : scene.map) {
    json je;
    je["kind"] = elem.kind;
    json pts = json::array();
    for (const auto& p : elem.polyline_world) pts.push_back(dump_vec3(p));
    je["points"] = std::move(pts);
    map.push_back(std::move(je));
  }
  doc["map"] = std::move(map);

  json frames = json::array();
  for (const auto& frame : scene.frames) {
    json jf;
    jf["index"] = frame.index;
    jf["timestamp"] = frame.timestamp;
    jf["ego"] = {{"rotation", dump_mat3(frame.ego.rotation_we)},
                 {"translation", dump_vec3(frame.ego.translation_we)}};
    json jins = json::array();
    for (const auto& ins : frame.instances) {
      json ji;
      ji["track_id"] = ins.track_id;
      ji["class"] = ins.class_label;
      ji["center"] = dump_vec3(ins.center_world);
      ji["size"] = dump_vec3(ins.size);
      ji["yaw"] = ins.yaw_world;
      jins.push_back(std::move(ji));
    }
    jf["instances"] = std::move(jins);
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);

  return doc.dump();
}

std::vector<Violation> validate_scene(const Scene& scene, const ClassRegistry& registry) {
  std::vector<Violation> out;
  auto err = [&](std::string code, std::string loc, std::string msg) {
    out.push_back({std::move(code), std::move(loc), std::move(msg), Severity::kError});
  };

  check_finite(scene, out);

  if (scene.frames.empty()) err("FRAMES_EMPTY", "/frames", "frames non-empty violated");
  if (!(scene.frame_rate > 0.0))
    err("FRAME_RATE_NOT_POSITIVE", "/frame_rate", "frame_rate > 0 violated");

  std::set<std::string> cam_names;
  for (std::size_t c = 0; c < scene.cameras.size(); ++c) {
    const auto& cam = scene.cameras[c];
    const std::string base = "/cameras/" + std::to_string(c);
    if (!cam_names.insert(cam.name).second)
      err("CAM_NAME_DUPLICATE", base + "/name", "camera names unique violated");
    if (!orthonormal(cam.R))
      err("CAM_R_NOT_ORTHONORMAL", base + "/R", "camera R orthonormal within 1e-9 violated");
    const auto& k = cam.K;
    const bool k_ok = k(0, 0) > 0.0 && k(1, 1) > 0.0 && k(0, 1) == 0.0 && k(1, 0) == 0.0 &&
                      k(2, 0) == 0.0 && k(2, 1) == 0.0 && k(2, 2) == 1.0;
    if (!k_ok)
      err("CAM_K_MALFORMED", base + "/K",
          "K must be [[fx,0,cx],[0,fy,cy],[0,0,1]] with fx,fy > 0");
    if (cam.width <= 0 || cam.height <= 0)
      err("IMG_DIM_NOT_POSITIVE", base, "width/height > 0 violated");
    else if (cam.width % 8 != 0 || cam.height % 8 != 0)
      err("IMG_DIM_NOT_DIV8", base, "width and height divisible by 8 violated");
  }

  for (std::size_t e = 0; e < scene.map.size(); ++e) {
    const auto& elem = scene.map[e];
    const std::string base = "/map/" + std::to_string(e);
    if (!registry.has_road(elem.kind))
      err("MAP_KIND_UNKNOWN", base + "/kind", "road class \"" + elem.kind + "\" not in registry");
    if (elem.polyline_world.size() < 2)
      err("MAP_POLYLINE_TOO_SHORT", base + "/points", "polyline length >= 2 violated");
    for (std::size_t p = 1; p < elem.polyline_world.size(); ++p) {
      if (elem.polyline_world[p] == elem.polyline_world[p - 1]) {
        err("MAP_POINTS_IDENTICAL", base + "/points/" + std::to_string(p),
            "consecutive points not identical violated");
        break;
      }
    }
  }

  double prev_ts = 0.0;
  std::unordered_map<std::uint64_t, std::vector<int>> track_frames;
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    const auto& frame = scene.frames[f];
    const std::string base = "/frames/" + std::to_string(f);
    if (frame.index < 0) err("FRAME_INDEX_NEGATIVE", base + "/index", "index >= 0 violated");
    if (f > 0 && !(frame.timestamp > prev_ts))
      err("FRAME_TS_NOT_INCREASING", base + "/timestamp",
          "timestamps strictly increasing violated");
    prev_ts = frame.timestamp;

    if (!orthonormal(frame.ego.rotation_we))
      err("EGO_R_NOT_ORTHONORMAL", base + "/ego/rotation",
          "ego rotation orthonormal within 1e-9 violated");

    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < frame.instances.size(); ++i) {
      const auto& ins = frame.instances[i];
      const std::string ibase = base + "/instances/" + std::to_string(i);
      if (!seen.insert(ins.track_id).second)
        err("TRACK_ID_DUPLICATE", ibase + "/track_id",
            "track_ids unique within a frame violated");
      if (!(ins.size[0] > 0.0 && ins.size[1] > 0.0 && ins.size[2] > 0.0))
        err("INSTANCE_SIZE_NOT_POSITIVE", ibase + "/size", "size components > 0 violated");
      if (!registry.has_object(ins.class_label))
        err("CLASS_UNKNOWN", ibase + "/class",
            "object class \"" + ins.class_label + "\" not in registry");
      track_frames[ins.track_id].push_back(static_cast<int>(f));
    }
  }

  // Occlusion gaps in real tracks are common; flag them but keep the scene valid.
  for (auto& [tid, fs] : track_frames) {
    std::sort(fs.begin(), fs.end());
    for (std::size_t i = 1; i < fs.size(); ++i) {
      if (fs[i] != fs[i - 1] + 1) {
        out.push_back({"TRACK_NOT_CONTIGUOUS", "/frames/" + std::to_string(fs[i]),
                       "track " + std::to_string(tid) + " skips frames", Severity::kWarning});
        break;
      }
    }
  }

  return out;
}

}  // namespace physica
