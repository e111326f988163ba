#include "physica/flow.hpp"

#include "physica/errors.hpp"
#include "hull.hpp"

#include <algorithm>
#include <map>

namespace physica {

std::vector<FlowTrack> compute_offsets(const Scene& scene) {
  const int frame_count = scene.frame_count();
  std::map<std::uint64_t, FlowTrack> tracks;  // ordered -> stable output

  for (int i = 0; i < frame_count; ++i) {
    for (const auto& ins : scene.frames[i].instances) {
      auto [it, inserted] = tracks.try_emplace(ins.track_id);
      if (inserted) {
        it->second.track_id = ins.track_id;
        it->second.coordinates.resize(frame_count);
        it->second.offsets.resize(frame_count);
      }
      it->second.coordinates[i] = ins.center_world;
    }
  }

  for (auto& [id, track] : tracks) {
    for (int i = 1; i < frame_count; ++i) {
      if (track.coordinates[i] && track.coordinates[i - 1])
        track.offsets[i] = *track.coordinates[i] - *track.coordinates[i - 1];
    }
  }

  std::vector<FlowTrack> out;
  out.reserve(tracks.size());
  for (auto& [id, track] : tracks) out.push_back(std::move(track));
  return out;
}

TrajectoryMap rasterize_flow(const Scene& scene, const std::vector<FlowTrack>& tracks,
                             int frame, const CameraRig& cam, double z_near) {
  TrajectoryMap map(frame, cam.name, cam.width, cam.height);
  if (frame <= 0 || frame >= scene.frame_count()) return map;  // frame 0 stays zero

  std::map<std::uint64_t, const FlowTrack*> by_id;
  for (const auto& t : tracks) by_id[t.track_id] = &t;

  std::vector<detail::ProjectedBox> boxes;
  std::vector<Eigen::Vector3d> payloads;
  const auto& fr = scene.frames[frame];
  for (const auto& ins : fr.instances) {
    auto it = by_id.find(ins.track_id);
    if (it == by_id.end() || !it->second->offsets[frame]) continue;
    detail::ProjectedBox box;
    if (!detail::project_box(ins, fr.ego, cam, z_near, box)) continue;
    box.source = payloads.size();
    payloads.push_back(*it->second->offsets[frame]);
    boxes.push_back(std::move(box));
  }
  detail::sort_painter(boxes);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < cam.height; ++y) {
    const double py = y + 0.5;
    for (const auto& box : boxes) {
      if (y < box.row_begin || y >= box.row_end) continue;
      const Eigen::Vector3d& offset = payloads[box.source];
      for (int x = box.col_begin; x < box.col_end; ++x) {
        if (!detail::inside_hull(box.hull, x + 0.5, py)) continue;
        double* px = map.px(x, y);
        px[0] = offset.x();
        px[1] = offset.y();
        px[2] = offset.z();
      }
    }
  }
  return map;
}

FlowRgb normalize_to_rgb(const TrajectoryMap& map, double o_max) {
  if (!(o_max > 0.0)) throw InvalidBound("o_max must be > 0");
  FlowRgb out{map.frame, map.camera, ImageRgb8(map.width, map.height), o_max};
#pragma omp parallel for schedule(static)
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const double* src = map.px(x, y);
      std::uint8_t* dst = out.pixels.px(x, y);
      for (int c = 0; c < 3; ++c) {
        const double clamped = std::clamp(src[c], -o_max, o_max);
        dst[c] = round_half_up_u8(255.0 * (clamped / o_max + 1.0) / 2.0);
      }
    }
  }
  return out;
}

}  // namespace physica
