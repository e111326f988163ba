#pragma once

#include "physica/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace physica {

/// Everything the compile pipeline needs; serialized into manifest.json so a
/// run can be reproduced byte-for-byte from its manifest alone.
struct CompileConfig {
  double o_max = 3.0;          // flow normalization bound, meters/frame
  int fourier_l = 8;           // frequencies for box corners and camera params
  int d_model = 64;            // embedding width
  std::uint64_t seed = 20260809;
  double z_near = 0.1;         // meters
  double box_fill_alpha = 1.0;
  int map_line_width = 2;
  double coord_scale = 100.0;  // meters; divisor for T and box corners
  int pool = 8;                // spatial reduction stand-in for the video encoder
  int patch = 2;               // patch embed size on the pooled grid
  bool emit_raw_flow = false;  // also write trajectory maps to the tensor file
  int threads = 0;             // 0 = runtime default

  std::string to_json() const;
  static CompileConfig from_json(const std::string& text);  // throws SchemaError
};

struct CompileResult {
  int frames = 0;
  int cameras = 0;
  std::filesystem::path out_dir;
};

/// Scene -> full condition bundle on disk: flow/boxes/map PNGs per (frame,
/// camera) cell, embeddings and fused tensors, manifest.json. Outputs are
/// byte-identical for identical (scene, config) regardless of thread count.
/// Throws InvariantError on invalid scenes, IoError on filesystem failures.
CompileResult compile_scene(const Scene& scene, const std::filesystem::path& out_dir,
                            const CompileConfig& config = {});

CompileResult compile_scene_file(const std::filesystem::path& scene_path,
                                 const std::filesystem::path& out_dir,
                                 const CompileConfig& config = {});

/// Human-inspection composite: boxes over map, then flow blended at
/// flow_alpha. flow_alpha = 0 reproduces boxes-over-map exactly.
void render_overlay(const Scene& scene, int frame, const std::string& camera_name,
                    const std::filesystem::path& out_png, double flow_alpha = 0.5,
                    const CompileConfig& config = {});

std::string flow_png_name(const std::string& camera, int frame);
std::string boxes_png_name(const std::string& camera, int frame);
std::string map_png_name(const std::string& camera, int frame);

}  // namespace physica
