#include "physica/raster.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"
#include "hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace physica {

namespace {

// docs/palette.md. Indexed by registry order so rasters are stable inputs.
constexpr std::array<Rgb8, 10> kObjectPalette = {{
    {230, 60, 60},    // car
    {255, 150, 40},   // truck
    {255, 220, 60},   // bus
    {170, 110, 60},   // trailer
    {200, 80, 200},   // construction_vehicle
    {60, 200, 230},   // pedestrian
    {60, 230, 120},   // motorcycle
    {120, 230, 60},   // bicycle
    {240, 120, 160},  // traffic_cone
    {150, 150, 230},  // barrier
}};

constexpr std::array<Rgb8, 10> kRoadPalette = {{
    {90, 90, 90},     // lane
    {240, 240, 240},  // lane_divider
    {250, 200, 60},   // road_divider
    {80, 160, 250},   // drivable_area_boundary
    {250, 250, 120},  // crosswalk
    {140, 220, 140},  // walkway
    {250, 90, 90},    // stop_line
    {170, 140, 250},  // carpark_area
    {110, 180, 110},  // road_segment
    {210, 160, 100},  // traffic_island
}};

constexpr Rgb8 kUnknownColor{255, 255, 255};

struct Edge {
  Eigen::Vector2d a, b;
};

// The 12 cuboid edges as corner-index pairs in the 000..111 sign order.
constexpr std::array<std::pair<int, int>, 12> kBoxEdges = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // z-direction
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y-direction
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // x-direction
}};

double dist2_to_segment(double px, double py, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b) {
  const double dx = b.x() - a.x(), dy = b.y() - a.y();
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - a.x()) * dx + (py - a.y()) * dy) / len2, 0.0, 1.0);
  const double cx = a.x() + t * dx - px, cy = a.y() + t * dy - py;
  return cx * cx + cy * cy;
}

void blend_px(std::uint8_t* dst, Rgb8 color, double alpha) {
  if (alpha >= 1.0) {
    dst[0] = color.r; dst[1] = color.g; dst[2] = color.b;
    return;
  }
  dst[0] = round_half_up_u8(alpha * color.r + (1.0 - alpha) * dst[0]);
  dst[1] = round_half_up_u8(alpha * color.g + (1.0 - alpha) * dst[1]);
  dst[2] = round_half_up_u8(alpha * color.b + (1.0 - alpha) * dst[2]);
}

struct PaintBox {
  detail::ProjectedBox box;
  Rgb8 color;
  std::vector<Edge> edges;  // projected edges with both endpoints in front
};

}  // namespace

Rgb8 object_color(int registry_index) {
  if (registry_index < 0) return kUnknownColor;
  return kObjectPalette[static_cast<std::size_t>(registry_index) % kObjectPalette.size()];
}

Rgb8 road_color(int registry_index) {
  if (registry_index < 0) return kUnknownColor;
  return kRoadPalette[static_cast<std::size_t>(registry_index) % kRoadPalette.size()];
}

std::uint64_t palette_hash() {
  std::string bytes;
  for (const auto& c : kObjectPalette) {
    bytes.push_back(static_cast<char>(c.r));
    bytes.push_back(static_cast<char>(c.g));
    bytes.push_back(static_cast<char>(c.b));
  }
  for (const auto& c : kRoadPalette) {
    bytes.push_back(static_cast<char>(c.r));
    bytes.push_back(static_cast<char>(c.g));
    bytes.push_back(static_cast<char>(c.b));
  }
  return fnv1a64(bytes);
}

BoxRaster render_boxes(const Scene& scene, int frame, const CameraRig& cam,
                       const RasterStyle& style, const ClassRegistry& registry) {
  BoxRaster out{frame, cam.name, ImageRgb8(cam.width, cam.height), {}};
  if (frame < 0 || frame >= scene.frame_count()) return out;
  const auto& fr = scene.frames[frame];

  std::vector<PaintBox> boxes;
  std::set<std::string> classes_drawn;
  for (const auto& ins : fr.instances) {
    PaintBox pb;
    if (!detail::project_box(ins, fr.ego, cam, style.z_near, pb.box)) continue;
    pb.color = object_color(registry.object_index(ins.class_label));

    if (style.wireframe) {
      const BoxCorners corners = box_corners(ins);
      std::array<Projection, 8> proj;
      for (int c = 0; c < 8; ++c) {
        const Eigen::Vector3d pc =
            vehicle_to_camera(world_to_vehicle(corners.corners[c], fr.ego), cam);
        proj[c] = project(pc, cam, style.z_near);
      }
      for (const auto& [i, j] : kBoxEdges) {
        // Clipped edges are skipped: edges must stay inside the corner hull
        // so alpha=1 rasters match the per-pixel depth oracle exactly.
        if (proj[i].valid && proj[j].valid)
          pb.edges.push_back({{proj[i].u, proj[i].v}, {proj[j].u, proj[j].v}});
      }
    }
    classes_drawn.insert(ins.class_label);
    boxes.push_back(std::move(pb));
  }

  std::sort(boxes.begin(), boxes.end(), [](const PaintBox& a, const PaintBox& b) {
    if (a.box.center_depth != b.box.center_depth)
      return a.box.center_depth > b.box.center_depth;
    return a.box.track_id > b.box.track_id;
  });

  const double er2 = style.edge_radius * style.edge_radius;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < cam.height; ++y) {
    const double py = y + 0.5;
    for (const auto& pb : boxes) {
      if (y < pb.box.row_begin || y >= pb.box.row_end) continue;
      for (int x = pb.box.col_begin; x < pb.box.col_end; ++x) {
        const double px = x + 0.5;
        if (!detail::inside_hull(pb.box.hull, px, py)) continue;
        blend_px(out.pixels.px(x, y), pb.color, style.fill_alpha);
        for (const auto& e : pb.edges) {
          if (dist2_to_segment(px, py, e.a, e.b) <= er2) {
            out.pixels.set(x, y, pb.color);
            break;
          }
        }
      }
    }
  }

  for (const auto& label : classes_drawn)
    out.legend.emplace_back(label, object_color(registry.object_index(label)));
  return out;
}

MapRaster render_map(const Scene& scene, int frame, const CameraRig& cam,
                     const RasterStyle& style, const ClassRegistry& registry) {
  MapRaster out{frame, cam.name, ImageRgb8(cam.width, cam.height), {}};
  if (frame < 0 || frame >= scene.frame_count()) return out;
  const auto& ego = scene.frames[frame].ego;

  struct Stroke {
    Eigen::Vector2d a, b;
    Rgb8 color;
    int row_begin, row_end, col_begin, col_end;
  };
  std::vector<Stroke> strokes;
  std::set<std::string> kinds_drawn;
  const double radius = style.map_line_width * 0.5;

  for (const auto& elem : scene.map) {
    const Rgb8 color = road_color(registry.road_index(elem.kind));
    bool drew = false;
    for (std::size_t p = 1; p < elem.polyline_world.size(); ++p) {
      Eigen::Vector3d a =
          vehicle_to_camera(world_to_vehicle(elem.polyline_world[p - 1], ego), cam);
      Eigen::Vector3d b = vehicle_to_camera(world_to_vehicle(elem.polyline_world[p], ego), cam);
      if (a.z() < style.z_near && b.z() < style.z_near) continue;
      // Parametric clip at the near plane instead of dropping the segment.
      if (a.z() < style.z_near) {
        const double t = (style.z_near - a.z()) / (b.z() - a.z());
        a = a + t * (b - a);
      } else if (b.z() < style.z_near) {
        const double t = (style.z_near - b.z()) / (a.z() - b.z());
        b = b + t * (a - b);
      }
      const Projection pa = project(a, cam, style.z_near * 0.5);
      const Projection pb = project(b, cam, style.z_near * 0.5);
      if (!pa.valid || !pb.valid) continue;

      Stroke s{{pa.u, pa.v}, {pb.u, pb.v}, color, 0, 0, 0, 0};
      const double min_x = std::min(pa.u, pb.u) - radius, max_x = std::max(pa.u, pb.u) + radius;
      const double min_y = std::min(pa.v, pb.v) - radius, max_y = std::max(pa.v, pb.v) + radius;
      s.col_begin = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
      s.col_end = std::min(cam.width, static_cast<int>(std::ceil(max_x + 0.5)));
      s.row_begin = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
      s.row_end = std::min(cam.height, static_cast<int>(std::ceil(max_y + 0.5)));
      if (s.col_begin >= s.col_end || s.row_begin >= s.row_end) continue;
      strokes.push_back(s);
      drew = true;
    }
    if (drew) kinds_drawn.insert(elem.kind);
  }

  const double r2 = radius * radius;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < cam.height; ++y) {
    const double py = y + 0.5;
    for (const auto& s : strokes) {
      if (y < s.row_begin || y >= s.row_end) continue;
      for (int x = s.col_begin; x < s.col_end; ++x) {
        if (dist2_to_segment(x + 0.5, py, s.a, s.b) <= r2) out.pixels.set(x, y, s.color);
      }
    }
  }

  for (const auto& kind : kinds_drawn)
    out.legend.emplace_back(kind, road_color(registry.road_index(kind)));
  return out;
}

std::string legend_text(const Legend& legend) {
  std::string out;
  char buf[16];
  for (const auto& [label, c] : legend) {
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
    if (!out.empty()) out.push_back(';');
    out += label + "=" + buf;
  }
  return out;
}

}  // namespace physica
