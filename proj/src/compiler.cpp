#include "physica/compiler.hpp"

#include "physica/attention.hpp"
#include "physica/embed.hpp"
#include "physica/errors.hpp"
#include "physica/flow.hpp"
#include "physica/png_io.hpp"
#include "physica/raster.hpp"
#include "physica/rng.hpp"
#include "physica/tensor_file.hpp"

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace physica {

using json = nlohmann::json;

namespace {

std::string cell_name(const char* prefix, const std::string& camera, int frame) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", frame);
  return std::string(prefix) + "_" + camera + "_" + buf + ".png";
}

std::string frame_key(const char* prefix, int frame) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", frame);
  return std::string(prefix) + "/" + buf;
}

/// Pooled-and-lifted tokens: average-pool the raster by `pool`, group the
/// pooled grid into patch x patch cells, and lift each flattened cell to
/// d_model with a shared seeded linear map (the video-encoder stand-in).
struct TokenEncoder {
  int pool = 8;
  int patch = 2;
  MlpParams lift;  // single linear layer [patch*patch*3 -> d_model]

  TokenGrid encode(const ImageRgb8& img, int frames_slot_t = 1) const {
    const int ph = img.height / pool;
    const int pw = img.width / pool;
    const int gh = ph / patch;
    const int gw = pw / patch;
    TokenGrid grid(frames_slot_t, gh, gw, lift.output_dim());
    encode_into(img, grid, 0);
    return grid;
  }

  void encode_into(const ImageRgb8& img, TokenGrid& grid, int t_slot) const {
    const int ph = img.height / pool;
    const int pw = img.width / pool;
    std::vector<double> pooled(static_cast<std::size_t>(ph) * pw * 3, 0.0);
    const double norm = 1.0 / (255.0 * pool * pool);
    for (int py = 0; py < ph; ++py)
      for (int px = 0; px < pw; ++px) {
        double acc[3] = {0.0, 0.0, 0.0};
        for (int dy = 0; dy < pool; ++dy)
          for (int dx = 0; dx < pool; ++dx) {
            const std::uint8_t* p = img.px(px * pool + dx, py * pool + dy);
            acc[0] += p[0];
            acc[1] += p[1];
            acc[2] += p[2];
          }
        double* dst = pooled.data() + (static_cast<std::size_t>(py) * pw + px) * 3;
        dst[0] = acc[0] * norm;
        dst[1] = acc[1] * norm;
        dst[2] = acc[2] * norm;
      }

    Vec cell(static_cast<std::size_t>(patch) * patch * 3);
    for (int gy = 0; gy < grid.h; ++gy)
      for (int gx = 0; gx < grid.w; ++gx) {
        std::size_t k = 0;
        for (int dy = 0; dy < patch; ++dy)
          for (int dx = 0; dx < patch; ++dx) {
            const double* p =
                pooled.data() +
                (static_cast<std::size_t>(gy * patch + dy) * pw + gx * patch + dx) * 3;
            cell[k++] = p[0];
            cell[k++] = p[1];
            cell[k++] = p[2];
          }
        const Vec token = lift.forward(cell);
        for (int c = 0; c < grid.c; ++c) grid.at(t_slot, gy, gx, c) = token[static_cast<std::size_t>(c)];
      }
  }
};

Mat grid_frame_tokens(const TokenGrid& grid, int t) {
  Mat out(grid.h * grid.w, grid.c);
  std::copy_n(grid.data.begin() + static_cast<std::ptrdiff_t>(grid.index(t, 0, 0, 0)),
              static_cast<std::size_t>(grid.h) * grid.w * grid.c, out.data.begin());
  return out;
}

std::vector<float> to_f32(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

std::vector<float> mat_f32(const Mat& m) { return to_f32(m.data); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

json config_json(const CompileConfig& c) {
  json j;
  j["o_max"] = c.o_max;
  j["fourier_l"] = c.fourier_l;
  j["d_model"] = c.d_model;
  j["seed"] = c.seed;
  j["z_near"] = c.z_near;
  j["box_fill_alpha"] = c.box_fill_alpha;
  j["map_line_width"] = c.map_line_width;
  j["coord_scale"] = c.coord_scale;
  j["pool"] = c.pool;
  j["patch"] = c.patch;
  j["emit_raw_flow"] = c.emit_raw_flow;
  j["threads"] = c.threads;
  return j;
}

}  // namespace

std::string flow_png_name(const std::string& camera, int frame) {
  return cell_name("flow", camera, frame);
}
std::string boxes_png_name(const std::string& camera, int frame) {
  return cell_name("boxes", camera, frame);
}
std::string map_png_name(const std::string& camera, int frame) {
  return cell_name("map", camera, frame);
}

std::string CompileConfig::to_json() const { return config_json(*this).dump(); }

CompileConfig CompileConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what(), "/");
  }
  if (!j.is_object()) throw SchemaError("config must be an object", "/");
  CompileConfig c;
  auto num = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw SchemaError("wrong type, expected number", std::string("/") + key);
    dst = j[key].get<double>();
  };
  auto integer = [&](const char* key, int& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
      throw SchemaError("wrong type, expected integer", std::string("/") + key);
    dst = j[key].get<int>();
  };
  num("o_max", c.o_max);
  integer("fourier_l", c.fourier_l);
  integer("d_model", c.d_model);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      throw SchemaError("wrong type, expected unsigned integer", "/seed");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  num("z_near", c.z_near);
  num("box_fill_alpha", c.box_fill_alpha);
  integer("map_line_width", c.map_line_width);
  num("coord_scale", c.coord_scale);
  integer("pool", c.pool);
  integer("patch", c.patch);
  if (j.contains("emit_raw_flow")) {
    if (!j["emit_raw_flow"].is_boolean())
      throw SchemaError("wrong type, expected boolean", "/emit_raw_flow");
    c.emit_raw_flow = j["emit_raw_flow"].get<bool>();
  }
  integer("threads", c.threads);
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"o_max", "fourier_l", "d_model", "seed", "z_near",
                                  "box_fill_alpha", "map_line_width", "coord_scale",
                                  "pool", "patch", "emit_raw_flow", "threads"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw SchemaError("unexpected field \"" + it.key() + "\"", "/");
  }
  return c;
}

CompileResult compile_scene(const Scene& scene, const std::filesystem::path& out_dir,
                            const CompileConfig& config) {
  const auto violations = validate_scene(scene);
  for (const auto& v : violations)
    if (v.severity == Severity::kError)
      throw InvariantError(v.message + " (" + v.code + " at " + v.location + ")", v.code);

#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir.string());

  const int frames = scene.frame_count();
  const int views = scene.view_count();
  for (const auto& cam : scene.cameras)
    if (cam.width != scene.cameras[0].width || cam.height != scene.cameras[0].height)
      throw DimMismatch("view inflation requires equal camera dimensions");
  const FourierSpec spec{config.fourier_l};
  const int d = config.d_model;

  // Seeded parameter sets, one derived stream per role.
  const MlpParams e_cam =
      MlpParams::seeded({7 * 3 * 2 * spec.num_frequencies, 4 * d, d},
                        derive_seed(config.seed, "e_cam"));
  const MlpParams mlp_p =
      MlpParams::seeded({24 * 2 * spec.num_frequencies, 4 * d, d},
                        derive_seed(config.seed, "mlp_p"));
  const MlpParams mlp_b =
      MlpParams::seeded({2 * d, 4 * d, d}, derive_seed(config.seed, "mlp_b"));
  const ClassEmbeddingTable table = ClassEmbeddingTable::seeded(
      ClassRegistry::defaults(), d, derive_seed(config.seed, "class_table"));
  const AttentionParams attn_vehicle =
      AttentionParams::seeded(d, derive_seed(config.seed, "attn_vehicle"));
  const AttentionParams attn_condition =
      AttentionParams::seeded(d, derive_seed(config.seed, "attn_condition"));

  // Patch size degrades to 1 when the pooled grid cannot be tiled evenly.
  int patch = std::max(1, config.patch);
  for (const auto& cam : scene.cameras) {
    const int ph = cam.height / config.pool, pw = cam.width / config.pool;
    while (patch > 1 && (ph % patch != 0 || pw % patch != 0)) --patch;
  }
  TokenEncoder encoder{config.pool, patch,
                       MlpParams::seeded({patch * patch * 3, d},
                                         derive_seed(config.seed, "patch_embed"))};

  const CameraPrescale prescale{true, config.coord_scale};
  const RasterStyle style{config.box_fill_alpha, true, 0.5, config.map_line_width,
                          config.z_near};

  const std::vector<FlowTrack> tracks = compute_offsets(scene);

  // Camera embeddings.
  Mat h_c(views, d);
  for (int v = 0; v < views; ++v) {
    const CameraEmbedding emb = embed_camera(scene.cameras[v], e_cam, spec, prescale);
    std::copy(emb.h_c.begin(), emb.h_c.end(), h_c.row(v));
  }

  // Box-coordinate hidden states per frame.
  std::vector<BoxHidden> h_coor(frames);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < frames; ++f)
    h_coor[f] = embed_frame_boxes(scene, f, table, mlp_p, mlp_b, spec, config.coord_scale);

  // Raster cells: PNGs on disk plus pooled token grids for fusion.
  std::vector<TokenGrid> flow_grids, box_grids, map_grids;
  for (int v = 0; v < views; ++v) {
    const auto& cam = scene.cameras[v];
    const int gh = cam.height / config.pool / patch;
    const int gw = cam.width / config.pool / patch;
    flow_grids.emplace_back(frames, gh, gw, d);
    box_grids.emplace_back(frames, gh, gw, d);
    map_grids.emplace_back(frames, gh, gw, d);
  }

  TensorFile raw_flow_file;
  std::string cell_error;
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int f = 0; f < frames; ++f) {
    for (int v = 0; v < views; ++v) {
      try {
        const auto& cam = scene.cameras[v];
        const TrajectoryMap flow_map = rasterize_flow(scene, tracks, f, cam, config.z_near);
        const FlowRgb flow_rgb = normalize_to_rgb(flow_map, config.o_max);
        const BoxRaster boxes = render_boxes(scene, f, cam, style);
        const MapRaster map = render_map(scene, f, cam, style);

        write_png_file((out_dir / flow_png_name(cam.name, f)).string(), flow_rgb.pixels,
                       {{"o_max", std::to_string(config.o_max)}});
        write_png_file((out_dir / boxes_png_name(cam.name, f)).string(), boxes.pixels,
                       {{"legend", legend_text(boxes.legend)}});
        write_png_file((out_dir / map_png_name(cam.name, f)).string(), map.pixels,
                       {{"legend", legend_text(map.legend)}});

        encoder.encode_into(flow_rgb.pixels, flow_grids[v], f);
        encoder.encode_into(boxes.pixels, box_grids[v], f);
        encoder.encode_into(map.pixels, map_grids[v], f);

        if (config.emit_raw_flow) {
#pragma omp critical(raw_flow)
          raw_flow_file.add(TensorEntry::f64(
              frame_key(("flow_raw/" + cam.name).c_str(), f),
              {static_cast<std::uint32_t>(cam.height), static_cast<std::uint32_t>(cam.width), 3},
              flow_map.data));
        }
      } catch (const std::exception& e) {
#pragma omp critical(cell_error)
        if (cell_error.empty()) cell_error = e.what();
      }
    }
  }
  if (!cell_error.empty()) throw IoError(cell_error);

  // Width-inflated grids: spatial tokens span all views jointly.
  const TokenGrid flow_inflated = inflate_views(flow_grids);
  const TokenGrid box_inflated = inflate_views(box_grids);
  const TokenGrid map_inflated = inflate_views(map_grids);

  std::vector<Mat> h_vehicle(frames), h_condition(frames);
#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < frames; ++f) {
    const Mat map_tokens = grid_frame_tokens(map_inflated, f);
    const Mat box_tokens = grid_frame_tokens(box_inflated, f);
    const Mat world_tokens = grid_frame_tokens(flow_inflated, f);

    Mat coor(static_cast<int>(h_coor[f].vectors.size()), d);
    for (std::size_t b = 0; b < h_coor[f].vectors.size(); ++b)
      std::copy(h_coor[f].vectors[b].begin(), h_coor[f].vectors[b].end(),
                coor.row(static_cast<int>(b)));

    h_vehicle[f] = fuse_vehicle(map_tokens, box_tokens, coor, attn_vehicle);
    h_condition[f] = fuse_condition(h_vehicle[f], h_c, world_tokens, attn_condition);
  }

  // Tensor containers; entry order is fixed, so bytes are reproducible.
  TensorFile embeddings;
  embeddings.add(TensorEntry::f32("h_c",
                                  {static_cast<std::uint32_t>(views),
                                   static_cast<std::uint32_t>(d)},
                                  mat_f32(h_c)));
  for (int f = 0; f < frames; ++f) {
    std::vector<double> flat;
    flat.reserve(h_coor[f].vectors.size() * static_cast<std::size_t>(d));
    for (const auto& v : h_coor[f].vectors) flat.insert(flat.end(), v.begin(), v.end());
    embeddings.add(TensorEntry::f32(
        frame_key("h_coor", f),
        {static_cast<std::uint32_t>(h_coor[f].vectors.size()), static_cast<std::uint32_t>(d)},
        to_f32(flat)));
  }
  write_tensor_file((out_dir / "embeddings.pct").string(), embeddings);

  TensorFile fused;
  for (int f = 0; f < frames; ++f)
    fused.add(TensorEntry::f32(frame_key("h_vehicle", f),
                               {static_cast<std::uint32_t>(h_vehicle[f].rows),
                                static_cast<std::uint32_t>(d)},
                               mat_f32(h_vehicle[f])));
  for (int f = 0; f < frames; ++f)
    fused.add(TensorEntry::f32(frame_key("h_condition", f),
                               {static_cast<std::uint32_t>(h_condition[f].rows),
                                static_cast<std::uint32_t>(d)},
                               mat_f32(h_condition[f])));
  write_tensor_file((out_dir / "fused.pct").string(), fused);

  if (config.emit_raw_flow) {
    std::sort(raw_flow_file.entries.begin(), raw_flow_file.entries.end(),
              [](const TensorEntry& a, const TensorEntry& b) { return a.name < b.name; });
    write_tensor_file((out_dir / "flow_raw.pct").string(), raw_flow_file);
  }

  json manifest;
  manifest["format"] = "physica-manifest/1";
  manifest["scene_format"] = "physica-scene/1";
  manifest["tensor_format"] = "PCT1";
  manifest["scene_id"] = scene.scene_id;
  manifest["frames"] = frames;
  manifest["cameras"] = views;
  // Worker count is execution policy, not content; keeping it out of the
  // manifest keeps output directories byte-identical across thread counts.
  json manifest_config = config_json(config);
  manifest_config.erase("threads");
  manifest["config"] = manifest_config;
  manifest["patch_effective"] = patch;
  manifest["token_layout"] = "pool" + std::to_string(config.pool) + "+patch" +
                             std::to_string(patch) + "+lift" + std::to_string(d);
  manifest["camera_prescale"] = "K/width, T/" + std::to_string(config.coord_scale) + "m, R raw";
  manifest["palette_hash"] = palette_hash();
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  return {frames, views, out_dir};
}

CompileResult compile_scene_file(const std::filesystem::path& scene_path,
                                 const std::filesystem::path& out_dir,
                                 const CompileConfig& config) {
  std::ifstream f(scene_path, std::ios::binary);
  if (!f) throw IoError("cannot open scene: " + scene_path.string());
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return compile_scene(parse_scene(text), out_dir, config);
}

void render_overlay(const Scene& scene, int frame, const std::string& camera_name,
                    const std::filesystem::path& out_png, double flow_alpha,
                    const CompileConfig& config) {
  if (frame < 0 || frame >= scene.frame_count())
    throw InvalidRange("frame " + std::to_string(frame) + " out of range");
  const CameraRig* cam = nullptr;
  for (const auto& c : scene.cameras)
    if (c.name == camera_name) cam = &c;
  if (!cam) throw InvalidRange("unknown camera \"" + camera_name + "\"");

  const RasterStyle style{config.box_fill_alpha, true, 0.5, config.map_line_width,
                          config.z_near};
  const MapRaster map = render_map(scene, frame, *cam, style);
  const BoxRaster boxes = render_boxes(scene, frame, *cam, style);
  const auto tracks = compute_offsets(scene);
  const FlowRgb flow =
      normalize_to_rgb(rasterize_flow(scene, tracks, frame, *cam, config.z_near), config.o_max);

  ImageRgb8 out = map.pixels;
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      const Rgb8 b = boxes.pixels.get(x, y);
      if (b.r || b.g || b.b) out.set(x, y, b);
      if (flow_alpha > 0.0) {
        const Rgb8 base = out.get(x, y);
        const Rgb8 fl = flow.pixels.get(x, y);
        out.set(x, y,
                {round_half_up_u8((1.0 - flow_alpha) * base.r + flow_alpha * fl.r),
                 round_half_up_u8((1.0 - flow_alpha) * base.g + flow_alpha * fl.g),
                 round_half_up_u8((1.0 - flow_alpha) * base.b + flow_alpha * fl.b)});
      }
    }
  write_png_file(out_png.string(), out);
}

}  // namespace physica
