#include "physica/embed.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"

#include <algorithm>
#include <cmath>

namespace physica {

namespace {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

MlpParams MlpParams::seeded(std::vector<int> dims, std::uint64_t seed) {
  MlpParams p;
  p.dims = std::move(dims);
  p.provenance = "seeded(" + std::to_string(seed) + ")";
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < p.dims.size(); ++l) {
    const int fan_in = p.dims[l], fan_out = p.dims[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Mat w(fan_out, fan_in);
    for (auto& v : w.data) v = rng.uniform(-a, a);
    Vec b(static_cast<std::size_t>(fan_out));
    for (auto& v : b) v = rng.uniform(-a, a);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

Vec MlpParams::forward(const Vec& x) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw DimMismatch("MLP expects input dim " + std::to_string(input_dim()) + ", got " +
                      std::to_string(x.size()));
  Vec h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Vec next = matvec(weights[l], h);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += biases[l][i];
    if (l + 1 < weights.size())
      for (auto& v : next) v = gelu(v);
    h = std::move(next);
  }
  return h;
}

ClassEmbeddingTable ClassEmbeddingTable::seeded(const ClassRegistry& registry, int d_model,
                                                std::uint64_t seed) {
  ClassEmbeddingTable table;
  table.d_model = d_model;
  table.seed = seed;
  for (const auto& label : registry.object_classes) {
    SplitMix64 rng(seed ^ fnv1a64(label));
    Vec v(static_cast<std::size_t>(d_model));
    double norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    if (norm > 1e-12) {
      for (auto& x : v) x /= norm;
    } else {
      v[0] = 1.0;
    }
    table.vectors.emplace(label, std::move(v));
  }
  return table;
}

const Vec& ClassEmbeddingTable::at(const std::string& label) const {
  auto it = vectors.find(label);
  if (it == vectors.end()) throw UnknownClass("class \"" + label + "\" not in embedding table");
  return it->second;
}

Mat build_pbar(const CameraRig& cam, const CameraPrescale& prescale) {
  const double k_scale = prescale.k_over_width ? 1.0 / cam.width : 1.0;
  Mat pbar(7, 3);
  for (int col = 0; col < 3; ++col)
    for (int j = 0; j < 3; ++j) pbar.at(col, j) = cam.K(j, col) * k_scale;
  for (int col = 0; col < 3; ++col)
    for (int j = 0; j < 3; ++j) pbar.at(3 + col, j) = cam.R(j, col);
  for (int j = 0; j < 3; ++j) pbar.at(6, j) = cam.T(j) / prescale.t_scale;
  return pbar;
}

CameraEmbedding embed_camera(const CameraRig& cam, const MlpParams& e_cam,
                             const FourierSpec& spec, const CameraPrescale& prescale) {
  const Mat pbar = build_pbar(cam, prescale);
  const std::vector<double> flat(pbar.data.begin(), pbar.data.end());
  const std::vector<double> feat = fourier_embed(flat, spec);
  if (static_cast<int>(feat.size()) != e_cam.input_dim())
    throw DimMismatch("E_cam expects input dim " + std::to_string(e_cam.input_dim()) +
                      ", Fourier(pbar) has " + std::to_string(feat.size()));
  return {cam.name, e_cam.forward(feat)};
}

Vec embed_box(const Instance& instance, const EgoPose& ego, const ClassEmbeddingTable& table,
              const MlpParams& mlp_p, const MlpParams& mlp_b, const FourierSpec& spec,
              double coord_scale) {
  const Vec& class_vec = table.at(instance.class_label);

  const BoxCorners corners = box_corners(instance);
  std::vector<double> flat;
  flat.reserve(24);
  for (const auto& corner : corners.corners) {
    const Eigen::Vector3d v = world_to_vehicle(corner, ego);
    flat.push_back(v.x() / coord_scale);
    flat.push_back(v.y() / coord_scale);
    flat.push_back(v.z() / coord_scale);
  }
  const Vec pos = mlp_p.forward(fourier_embed(flat, spec));

  Vec joint;
  joint.reserve(class_vec.size() + pos.size());
  joint.insert(joint.end(), class_vec.begin(), class_vec.end());
  joint.insert(joint.end(), pos.begin(), pos.end());
  return mlp_b.forward(joint);
}

BoxHidden embed_frame_boxes(const Scene& scene, int frame, const ClassEmbeddingTable& table,
                            const MlpParams& mlp_p, const MlpParams& mlp_b,
                            const FourierSpec& spec, double coord_scale) {
  BoxHidden out;
  if (frame < 0 || frame >= scene.frame_count()) return out;
  const auto& fr = scene.frames[frame];

  std::vector<const Instance*> order;
  order.reserve(fr.instances.size());
  for (const auto& ins : fr.instances) order.push_back(&ins);
  std::sort(order.begin(), order.end(),
            [](const Instance* a, const Instance* b) { return a->track_id < b->track_id; });

  for (const Instance* ins : order) {
    out.track_ids.push_back(ins->track_id);
    out.vectors.push_back(embed_box(*ins, fr.ego, table, mlp_p, mlp_b, spec, coord_scale));
  }
  return out;
}

void save_mlp(TensorFile& file, const std::string& prefix, const MlpParams& params) {
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    const Mat& w = params.weights[l];
    file.add(TensorEntry::f64(prefix + "/w" + std::to_string(l),
                              {static_cast<std::uint32_t>(w.rows),
                               static_cast<std::uint32_t>(w.cols)},
                              w.data));
    file.add(TensorEntry::f64(prefix + "/b" + std::to_string(l),
                              {static_cast<std::uint32_t>(params.biases[l].size())},
                              params.biases[l]));
  }
}

MlpParams load_mlp(const TensorFile& file, const std::string& prefix) {
  MlpParams p;
  p.provenance = "loaded(" + prefix + ")";
  for (std::size_t l = 0;; ++l) {
    const TensorEntry* w = file.find(prefix + "/w" + std::to_string(l));
    const TensorEntry* b = file.find(prefix + "/b" + std::to_string(l));
    if (!w || !b) break;
    if (w->dims.size() != 2 || b->dims.size() != 1 || w->dims[0] != b->dims[0])
      throw DimMismatch("inconsistent layer shapes for " + prefix);
    Mat m(static_cast<int>(w->dims[0]), static_cast<int>(w->dims[1]));
    m.data = w->as_f64();
    p.weights.push_back(std::move(m));
    p.biases.push_back(b->as_f64());
    if (l == 0) p.dims.push_back(static_cast<int>(w->dims[1]));
    p.dims.push_back(static_cast<int>(w->dims[0]));
  }
  if (p.weights.empty()) throw DimMismatch("no layers found for " + prefix);
  return p;
}

}  // namespace physica
