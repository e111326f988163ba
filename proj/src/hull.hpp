#pragma once

// Shared projected-cuboid machinery for the flow and layout rasterizers.
// Coverage rule: a pixel belongs to a box iff its center (x+0.5, y+0.5) lies
// inside or on the convex hull of the box's validly projected corners.
// Degenerate hulls (< 3 vertices) cover nothing.

#include "physica/geometry.hpp"
#include "physica/scene.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace physica::detail {

struct HullPoly {
  std::vector<Eigen::Vector2d> verts;  // CCW
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
};

/// Andrew monotone chain; collinear midpoints dropped. Input order irrelevant.
HullPoly convex_hull(std::vector<Eigen::Vector2d> pts);

inline bool inside_hull(const HullPoly& h, double px, double py) {
  const std::size_t n = h.verts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = h.verts[i];
    const auto& b = h.verts[(i + 1) % n];
    const double cross = (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
    if (cross < 0.0) return false;
  }
  return true;
}

struct ProjectedBox {
  HullPoly hull;
  double center_depth = 0.0;  // camera-frame z of the box center
  std::uint64_t track_id = 0;
  std::size_t source = 0;  // caller-side payload index
  int row_begin = 0, row_end = 0;  // clipped pixel-row range [begin, end)
  int col_begin = 0, col_end = 0;
};

/// Projects one instance; returns false when no fillable hull exists.
bool project_box(const Instance& instance, const EgoPose& ego, const CameraRig& cam,
                 double z_near, ProjectedBox& out);

/// Back-to-front painter order: descending center depth, equal depths broken
/// so the lower track_id is drawn last (ends up on top).
void sort_painter(std::vector<ProjectedBox>& boxes);

}  // namespace physica::detail
