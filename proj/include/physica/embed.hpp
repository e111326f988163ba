#pragma once

#include "physica/geometry.hpp"
#include "physica/mat.hpp"
#include "physica/scene.hpp"
#include "physica/tensor_file.hpp"

#include <map>
#include <string>
#include <vector>

namespace physica {

/// Plain fully connected stack: GELU between layers, identity at the output.
/// Seeded weights come from a single splitmix64 stream per layer order
/// (weights row-major, then bias), uniform in [-a, a] with
/// a = sqrt(6 / (fan_in + fan_out)).
struct MlpParams {
  std::vector<int> dims;  // dims[0] = input, dims.back() = output
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  std::string provenance;

  static MlpParams seeded(std::vector<int> dims, std::uint64_t seed);

  int input_dim() const { return dims.empty() ? 0 : dims.front(); }
  int output_dim() const { return dims.empty() ? 0 : dims.back(); }

  /// Throws DimMismatch when x.size() != input_dim().
  Vec forward(const Vec& x) const;
};

/// Stand-in for pooled text-encoder class embeddings: a deterministic
/// unit-norm vector per label, keyed by the label string so the mapping is
/// stable under registry reordering.
struct ClassEmbeddingTable {
  int d_model = 0;
  std::uint64_t seed = 0;
  std::map<std::string, Vec> vectors;

  static ClassEmbeddingTable seeded(const ClassRegistry& registry, int d_model,
                                    std::uint64_t seed);

  /// Throws UnknownClass.
  const Vec& at(const std::string& label) const;
};

struct CameraEmbedding {
  std::string camera;
  Vec h_c;
};

/// Hidden vectors for every box of one frame, in ascending track_id order.
struct BoxHidden {
  std::vector<std::uint64_t> track_ids;
  std::vector<Vec> vectors;
};

/// Pre-scaling applied to camera parameters before Fourier embedding; the
/// rotation is already bounded, K and T are not.
struct CameraPrescale {
  bool k_over_width = true;  // divide K entries by image width
  double t_scale = 100.0;    // divide T by this many meters
};

/// Rows: columns of (scaled) K, columns of R, then scaled T. Shape 7 x 3.
Mat build_pbar(const CameraRig& cam, const CameraPrescale& prescale = {});

/// h_c = E_cam(Fourier(pbar)). Throws DimMismatch when the MLP input width
/// is not 7 * 3 * 2L.
CameraEmbedding embed_camera(const CameraRig& cam, const MlpParams& e_cam,
                             const FourierSpec& spec, const CameraPrescale& prescale = {});

/// Box corners expressed in the frame's vehicle coordinate system and scaled
/// by 1/coord_scale before Fourier; h = mlp_b(concat(class_vec, mlp_p(...))).
Vec embed_box(const Instance& instance, const EgoPose& ego, const ClassEmbeddingTable& table,
              const MlpParams& mlp_p, const MlpParams& mlp_b, const FourierSpec& spec,
              double coord_scale = 100.0);

BoxHidden embed_frame_boxes(const Scene& scene, int frame, const ClassEmbeddingTable& table,
                            const MlpParams& mlp_p, const MlpParams& mlp_b,
                            const FourierSpec& spec, double coord_scale = 100.0);

/// Weight-file round trip through the tensor container, arrays named
/// <prefix>/w<layer> and <prefix>/b<layer>.
void save_mlp(TensorFile& file, const std::string& prefix, const MlpParams& params);
MlpParams load_mlp(const TensorFile& file, const std::string& prefix);

}  // namespace physica
