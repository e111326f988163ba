#pragma once

#include "physica/geometry.hpp"
#include "physica/image.hpp"
#include "physica/scene.hpp"

#include <string>
#include <utility>
#include <vector>

namespace physica {

struct RasterStyle {
  double fill_alpha = 1.0;   // 1.0 keeps fills equal to the depth oracle
  bool wireframe = true;     // 12 box edges at full intensity, within the silhouette
  double edge_radius = 0.5;  // half-width of edge strokes, pixels
  int map_line_width = 2;    // stroke width for road polylines, pixels
  double z_near = kDefaultZNear;
};

using Legend = std::vector<std::pair<std::string, Rgb8>>;

struct BoxRaster {
  int frame = 0;
  std::string camera;
  ImageRgb8 pixels;
  Legend legend;
};

struct MapRaster {
  int frame = 0;
  std::string camera;
  ImageRgb8 pixels;
  Legend legend;
};

/// Fixed palettes indexed by class registry order (docs/palette.md).
Rgb8 object_color(int registry_index);
Rgb8 road_color(int registry_index);
std::uint64_t palette_hash();

/// Boxes drawn back-to-front by center depth; nearer boxes paint over
/// farther ones. Background stays (0,0,0).
BoxRaster render_boxes(const Scene& scene, int frame, const CameraRig& cam,
                       const RasterStyle& style = {},
                       const ClassRegistry& registry = ClassRegistry::defaults());

/// Road polylines transformed to the camera, clipped at z_near by parametric
/// intersection, stroked in road-class color. Elements draw in input order.
MapRaster render_map(const Scene& scene, int frame, const CameraRig& cam,
                     const RasterStyle& style = {},
                     const ClassRegistry& registry = ClassRegistry::defaults());

std::string legend_text(const Legend& legend);

}  // namespace physica
