#include "hull.hpp"

#include <algorithm>
#include <cmath>

namespace physica::detail {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

HullPoly convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());

  HullPoly out;
  const std::size_t n = pts.size();
  if (n < 3) {
    out.verts = std::move(pts);
  } else {
    std::vector<Eigen::Vector2d> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
      hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
      while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    out.verts = std::move(hull);
  }

  if (!out.verts.empty()) {
    out.min_x = out.max_x = out.verts[0].x();
    out.min_y = out.max_y = out.verts[0].y();
    for (const auto& p : out.verts) {
      out.min_x = std::min(out.min_x, p.x());
      out.max_x = std::max(out.max_x, p.x());
      out.min_y = std::min(out.min_y, p.y());
      out.max_y = std::max(out.max_y, p.y());
    }
  }
  return out;
}

bool project_box(const Instance& instance, const EgoPose& ego, const CameraRig& cam,
                 double z_near, ProjectedBox& out) {
  const BoxCorners corners = box_corners(instance);
  std::vector<Eigen::Vector2d> projected;
  projected.reserve(8);
  for (const auto& corner : corners.corners) {
    const Eigen::Vector3d pc = vehicle_to_camera(world_to_vehicle(corner, ego), cam);
    const Projection pr = project(pc, cam, z_near);
    if (pr.valid) projected.emplace_back(pr.u, pr.v);
  }
  if (projected.size() < 3) return false;

  out.hull = convex_hull(std::move(projected));
  if (out.hull.verts.size() < 3) return false;

  const Eigen::Vector3d center_cam =
      vehicle_to_camera(world_to_vehicle(instance.center_world, ego), cam);
  out.center_depth = center_cam.z();
  out.track_id = instance.track_id;

  // Clip the pixel-center sweep range to the image.
  out.col_begin = std::max(0, static_cast<int>(std::floor(out.hull.min_x - 0.5)));
  out.col_end = std::min(cam.width, static_cast<int>(std::ceil(out.hull.max_x + 0.5)));
  out.row_begin = std::max(0, static_cast<int>(std::floor(out.hull.min_y - 0.5)));
  out.row_end = std::min(cam.height, static_cast<int>(std::ceil(out.hull.max_y + 0.5)));
  return out.col_begin < out.col_end && out.row_begin < out.row_end;
}

void sort_painter(std::vector<ProjectedBox>& boxes) {
  std::sort(boxes.begin(), boxes.end(), [](const ProjectedBox& a, const ProjectedBox& b) {
    if (a.center_depth != b.center_depth) return a.center_depth > b.center_depth;
    return a.track_id > b.track_id;
  });
}

}  // namespace physica::detail
