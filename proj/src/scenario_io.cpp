#include "physica/scenario_io.hpp"

#include "physica/errors.hpp"

#include <nlohmann/json.hpp>

namespace physica {

using json = nlohmann::json;

namespace {

double num_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError("wrong type, expected number", path);
  return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError("wrong type, expected integer", path);
  return j.get<int>();
}

double opt_num(const json& obj, const char* key, double fallback, const std::string& base) {
  if (!obj.contains(key)) return fallback;
  return num_at(obj[key], base + "/" + key);
}

int opt_int(const json& obj, const char* key, int fallback, const std::string& base) {
  if (!obj.contains(key)) return fallback;
  return int_at(obj[key], base + "/" + key);
}

Eigen::Vector3d vec3_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw SchemaError("expected array of 3 numbers", path);
  return {num_at(j[0], path), num_at(j[1], path), num_at(j[2], path)};
}

Eigen::Matrix3d mat3_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 9) throw SchemaError("expected array of 9 numbers", path);
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = num_at(j[i], path);
  return m;
}

Behavior parse_behavior(const json& j, const std::string& base) {
  if (!j.is_object()) throw SchemaError("wrong type, expected object", base);
  if (!j.contains("kind")) throw SchemaError("missing field \"kind\"", base);
  const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  Behavior b;
  if (kind == "constant_speed") {
    b.kind = Behavior::Kind::kConstantSpeed;
    b.speed = opt_num(j, "speed", 0.0, base);
  } else if (kind == "brake") {
    b.kind = Behavior::Kind::kBrake;
    b.t_start = opt_num(j, "t_start", 0.0, base);
    b.decel = opt_num(j, "decel", 0.0, base);
    b.v0 = opt_num(j, "v0", 0.0, base);
  } else if (kind == "cut_in") {
    b.kind = Behavior::Kind::kCutIn;
    b.t_start = opt_num(j, "t_start", 0.0, base);
    b.duration = opt_num(j, "duration", 0.0, base);
    b.speed = opt_num(j, "speed", 0.0, base);
    b.target_lane = opt_int(j, "target_lane", 0, base);
  } else {
    throw SchemaError("unknown behavior kind \"" + kind + "\"", base + "/kind");
  }
  return b;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SyntaxError(e.what(), 1, static_cast<int>(e.byte));
  }
  if (!doc.is_object()) throw SchemaError("scenario must be an object", "/");
  if (!doc.contains("format") || doc["format"] != "physica-scenario/1")
    throw SchemaError("unsupported scenario format", "/format");

  ScenarioFile out;
  const std::string mode =
      doc.contains("mode") && doc["mode"].is_string() ? doc["mode"].get<std::string>() : "";
  if (mode == "random") {
    out.random = true;
  } else if (mode != "scripted") {
    throw SchemaError("mode must be \"scripted\" or \"random\"", "/mode");
  }

  out.frames = opt_int(doc, "frames", 16, "");
  out.rate_hz = opt_num(doc, "rate", 2.0, "");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw SchemaError("wrong type, expected unsigned integer", "/seed");
    out.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("cameras")) {
    const json& cams = doc["cameras"];
    if (!cams.is_array()) throw SchemaError("wrong type, expected array", "/cameras");
    for (std::size_t c = 0; c < cams.size(); ++c) {
      const std::string base = "/cameras/" + std::to_string(c);
      const json& jc = cams[c];
      if (!jc.is_object()) throw SchemaError("wrong type, expected object", base);
      CameraRig rig;
      if (!jc.contains("name") || !jc["name"].is_string())
        throw SchemaError("missing string field \"name\"", base);
      rig.name = jc["name"].get<std::string>();
      rig.K = mat3_at(jc.value("K", json::array()), base + "/K");
      rig.R = mat3_at(jc.value("R", json::array()), base + "/R");
      rig.T = vec3_at(jc.value("T", json::array()), base + "/T");
      rig.width = opt_int(jc, "width", 0, base);
      rig.height = opt_int(jc, "height", 0, base);
      out.rig.push_back(std::move(rig));
    }
  } else {
    out.rig = default_rig(opt_int(doc, "image_width", 448, ""),
                          opt_int(doc, "image_height", 256, ""));
  }

  if (out.random) {
    ScenarioRanges r;
    if (doc.contains("ranges")) {
      const json& jr = doc["ranges"];
      if (!jr.is_object()) throw SchemaError("wrong type, expected object", "/ranges");
      r.min_lanes = opt_int(jr, "min_lanes", r.min_lanes, "/ranges");
      r.max_lanes = opt_int(jr, "max_lanes", r.max_lanes, "/ranges");
      r.lane_width = opt_num(jr, "lane_width", r.lane_width, "/ranges");
      r.lane_length = opt_num(jr, "lane_length", r.lane_length, "/ranges");
      r.arc_probability = opt_num(jr, "arc_probability", r.arc_probability, "/ranges");
      r.max_abs_curvature = opt_num(jr, "max_abs_curvature", r.max_abs_curvature, "/ranges");
      r.min_actors = opt_int(jr, "min_actors", r.min_actors, "/ranges");
      r.max_actors = opt_int(jr, "max_actors", r.max_actors, "/ranges");
      r.min_speed = opt_num(jr, "min_speed", r.min_speed, "/ranges");
      r.max_speed = opt_num(jr, "max_speed", r.max_speed, "/ranges");
      r.cut_in_probability = opt_num(jr, "cut_in_probability", r.cut_in_probability, "/ranges");
      r.brake_probability = opt_num(jr, "brake_probability", r.brake_probability, "/ranges");
    }
    r.num_frames = out.frames;
    r.rate_hz = out.rate_hz;
    out.ranges = r;
    return out;
  }

  if (!doc.contains("lanes") || !doc["lanes"].is_array() || doc["lanes"].empty())
    throw SchemaError("scripted scenario needs a non-empty \"lanes\" array", "/lanes");
  for (std::size_t i = 0; i < doc["lanes"].size(); ++i) {
    const std::string base = "/lanes/" + std::to_string(i);
    const json& jl = doc["lanes"][i];
    if (!jl.is_object()) throw SchemaError("wrong type, expected object", base);
    LaneSpec lane;
    if (jl.contains("start")) {
      const json& s = jl["start"];
      if (!s.is_array() || s.size() != 2)
        throw SchemaError("expected array of 2 numbers", base + "/start");
      lane.start = {num_at(s[0], base + "/start"), num_at(s[1], base + "/start")};
    }
    lane.heading = opt_num(jl, "heading", 0.0, base);
    lane.length = opt_num(jl, "length", 240.0, base);
    lane.curvature = opt_num(jl, "curvature", 0.0, base);
    lane.width = opt_num(jl, "width", 3.5, base);
    out.scenario.layout.lanes.push_back(lane);
  }

  if (doc.contains("ego")) {
    const json& je = doc["ego"];
    if (!je.is_object()) throw SchemaError("wrong type, expected object", "/ego");
    out.scenario.ego.lane = opt_int(je, "lane", 0, "/ego");
    out.scenario.ego.initial_offset = opt_num(je, "initial_offset", 0.0, "/ego");
    if (je.contains("speed_profile")) {
      const json& sp = je["speed_profile"];
      if (!sp.is_array() || sp.empty())
        throw SchemaError("expected non-empty array", "/ego/speed_profile");
      out.scenario.ego.speed_profile.clear();
      for (const auto& seg : sp) {
        if (!seg.is_array() || seg.size() != 2)
          throw SchemaError("expected [t, speed] pairs", "/ego/speed_profile");
        out.scenario.ego.speed_profile.emplace_back(num_at(seg[0], "/ego/speed_profile"),
                                                    num_at(seg[1], "/ego/speed_profile"));
      }
    }
  }

  if (doc.contains("actors")) {
    const json& actors = doc["actors"];
    if (!actors.is_array()) throw SchemaError("wrong type, expected array", "/actors");
    for (std::size_t a = 0; a < actors.size(); ++a) {
      const std::string base = "/actors/" + std::to_string(a);
      const json& ja = actors[a];
      if (!ja.is_object()) throw SchemaError("wrong type, expected object", base);
      ActorScript actor;
      actor.actor_id = static_cast<std::uint64_t>(opt_int(ja, "id", static_cast<int>(a) + 1, base));
      if (ja.contains("class")) {
        if (!ja["class"].is_string()) throw SchemaError("wrong type, expected string", base + "/class");
        actor.class_label = ja["class"].get<std::string>();
      }
      if (ja.contains("size")) actor.size = vec3_at(ja["size"], base + "/size");
      actor.lane = opt_int(ja, "lane", 0, base);
      actor.initial_offset = opt_num(ja, "initial_offset", 0.0, base);
      if (!ja.contains("behavior")) throw SchemaError("missing field \"behavior\"", base);
      actor.behavior = parse_behavior(ja["behavior"], base + "/behavior");
      out.scenario.actors.push_back(std::move(actor));
    }
  }
  return out;
}

Scene run_scenario(const ScenarioFile& file, std::uint64_t seed) {
  if (file.random) {
    const Scenario sc = random_scenario(file.ranges, seed);
    return simulate(sc.layout, sc.ego, sc.actors, file.frames, file.rate_hz, file.rig, seed);
  }
  return simulate(file.scenario.layout, file.scenario.ego, file.scenario.actors, file.frames,
                  file.rate_hz, file.rig, seed);
}

}  // namespace physica
