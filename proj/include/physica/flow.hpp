#pragma once

#include "physica/geometry.hpp"
#include "physica/image.hpp"
#include "physica/scene.hpp"

#include <optional>
#include <vector>

namespace physica {

/// Per-track world-frame positions and frame-to-frame motion vectors.
/// offsets[i] = coordinates[i] - coordinates[i-1], defined only when the
/// track is present in both frames; frame 0 and gap re-entries stay empty.
struct FlowTrack {
  std::uint64_t track_id = 0;
  std::vector<std::optional<Eigen::Vector3d>> coordinates;
  std::vector<std::optional<Eigen::Vector3d>> offsets;
};

/// Per-frame, per-camera H x W x 3 raster of world-frame offsets in
/// meters/frame. Uncovered pixels are exactly zero; frame 0 is all-zero.
struct TrajectoryMap {
  int frame = 0;
  std::string camera;
  int width = 0;
  int height = 0;
  std::vector<double> data;  // row-major, 3 channels

  TrajectoryMap() = default;
  TrajectoryMap(int frame, std::string cam, int w, int h)
      : frame(frame), camera(std::move(cam)), width(w), height(h),
        data(static_cast<std::size_t>(w) * h * 3, 0.0) {}

  double* px(int x, int y) {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const double* px(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
};

/// 8-bit visualization: x offset -> R, y -> G, z -> B; zero motion encodes
/// to 128 on every channel.
struct FlowRgb {
  int frame = 0;
  std::string camera;
  ImageRgb8 pixels;
  double o_max = 0.0;
};

/// One FlowTrack per track_id, sorted by track_id. All arithmetic stays in
/// the world frame, so ego motion never leaks into the offsets.
std::vector<FlowTrack> compute_offsets(const Scene& scene);

/// Fills the convex hull of each instance's validly projected box corners
/// with its offset vector; overlaps resolved nearest-center-depth-wins.
/// Frame 0 and offset-less instances contribute nothing.
TrajectoryMap rasterize_flow(const Scene& scene, const std::vector<FlowTrack>& tracks,
                             int frame, const CameraRig& cam,
                             double z_near = kDefaultZNear);

/// value = round_half_up(255 * (clamp(c, -o_max, o_max)/o_max + 1) / 2).
/// Throws InvalidBound when o_max <= 0.
FlowRgb normalize_to_rgb(const TrajectoryMap& map, double o_max);

/// Midpoint inverse of the encoding, for inspection and tests.
inline double decode_flow_channel(std::uint8_t v, double o_max) {
  return (2.0 * v - 255.0) / 255.0 * o_max;
}

}  // namespace physica
