#include "physica/flow.hpp"

#include "physica/errors.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <cmath>

using namespace physica;
using namespace physica::testing;

namespace {

Scene linear_track_scene(const Eigen::Vector3d& velocity, int frames) {
  Scene scene;
  scene.scene_id = "linear";
  scene.frame_rate = 2.0;
  scene.cameras = {simple_front_camera(64, 64)};
  for (int f = 0; f < frames; ++f) {
    Frame frame;
    frame.index = f;
    frame.timestamp = f * 0.5;
    Instance car;
    car.track_id = 1;
    car.class_label = "car";
    car.center_world = Eigen::Vector3d(10, 0, 0.8) + f * velocity;
    car.size = {4.0, 2.0, 1.6};
    frame.instances.push_back(car);
    scene.frames.push_back(frame);
  }
  return scene;
}

/// Dyadic-grid coordinates make translation arithmetic exact.
double snap(double x) { return std::round(x * 1024.0) / 1024.0; }

}  // namespace

TEST_CASE("parked instance carries zero offsets at every covered frame") {
  const Scene scene = linear_track_scene(Eigen::Vector3d::Zero(), 6);
  const auto tracks = compute_offsets(scene);
  REQUIRE(tracks.size() == 1);
  CHECK_FALSE(tracks[0].offsets[0].has_value());
  for (int f = 1; f < 6; ++f) {
    REQUIRE(tracks[0].offsets[f].has_value());
    CHECK(*tracks[0].offsets[f] == Eigen::Vector3d(0, 0, 0));
  }
}

TEST_CASE("unit velocity along world x gives unit offsets") {
  const Scene scene = linear_track_scene({1, 0, 0}, 5);
  const auto tracks = compute_offsets(scene);
  for (int f = 1; f < 5; ++f) CHECK(*tracks[0].offsets[f] == Eigen::Vector3d(1, 0, 0));
}

TEST_CASE("a track gap leaves offsets undefined across the gap") {
  Scene scene = linear_track_scene({1, 0, 0}, 9);
  scene.frames[5].instances.clear();  // absent at frame 5
  const auto tracks = compute_offsets(scene);
  REQUIRE(tracks.size() == 1);
  CHECK_FALSE(tracks[0].offsets[5].has_value());
  CHECK_FALSE(tracks[0].offsets[6].has_value());
  REQUIRE(tracks[0].offsets[7].has_value());
  CHECK(*tracks[0].offsets[7] == Eigen::Vector3d(1, 0, 0));

  // Brute-force re-diff: every defined offset equals the coordinate delta.
  for (std::size_t i = 1; i < tracks[0].offsets.size(); ++i) {
    const auto& t = tracks[0];
    if (t.coordinates[i] && t.coordinates[i - 1]) {
      REQUIRE(t.offsets[i].has_value());
      CHECK(*t.offsets[i] == *t.coordinates[i] - *t.coordinates[i - 1]);
    } else {
      CHECK_FALSE(t.offsets[i].has_value());
    }
  }
}

TEST_CASE("frame zero rasterizes to the zero matrix") {
  SplitMix64 rng(4);
  const Scene scene = random_scene(rng, {4, 6, 64, true});
  const auto tracks = compute_offsets(scene);
  const TrajectoryMap map = rasterize_flow(scene, tracks, 0, scene.cameras[0]);
  for (double v : map.data) CHECK(v == 0.0);
}

TEST_CASE("scenes without instances rasterize to zero at every frame") {
  Scene scene = linear_track_scene({1, 0, 0}, 4);
  for (auto& f : scene.frames) f.instances.clear();
  const auto tracks = compute_offsets(scene);
  for (int f = 0; f < 4; ++f) {
    const TrajectoryMap map = rasterize_flow(scene, tracks, f, scene.cameras[0]);
    for (double v : map.data) CHECK(v == 0.0);
  }
}

TEST_CASE("near box wins every contested pixel") {
  Scene scene;
  scene.scene_id = "overlap";
  scene.frame_rate = 2.0;
  scene.cameras = {simple_front_camera(64, 64)};
  for (int f = 0; f < 2; ++f) {
    Frame frame;
    frame.index = f;
    frame.timestamp = f * 0.5;
    Instance near, far;
    near.track_id = 1;
    near.class_label = "car";
    near.center_world = {5, 0, 0.5};
    near.size = {2.0, 2.0, 1.0};
    near.center_world += f * Eigen::Vector3d(0.25, 0, 0);
    far.track_id = 2;
    far.class_label = "truck";
    far.center_world = {10, 0, 0.5};
    far.size = {4.0, 4.0, 2.0};
    far.center_world += f * Eigen::Vector3d(-0.5, 0, 0);
    frame.instances = {near, far};
    scene.frames.push_back(frame);
  }

  const auto tracks = compute_offsets(scene);
  const TrajectoryMap map = rasterize_flow(scene, tracks, 1, scene.cameras[0]);
  const TrajectoryMap oracle = reference_flow_raster(scene, tracks, 1, scene.cameras[0],
                                                     kDefaultZNear);
  CHECK(map.data == oracle.data);

  // Pixel (32, 40) sits under both hulls (the near center projects to
  // v = 40.96), so it must carry the near offset (0.25, 0, 0).
  const double* contested = map.px(32, 40);
  CHECK(contested[0] == 0.25);
  CHECK(contested[1] == 0.0);
  CHECK(contested[2] == 0.0);
}

TEST_CASE("painter equals the per-pixel min-depth oracle on random scenes") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Scene scene = random_scene(rng, {4, 6, 64, true});
    const auto tracks = compute_offsets(scene);
    for (int f = 0; f < scene.frame_count(); ++f) {
      const TrajectoryMap got = rasterize_flow(scene, tracks, f, scene.cameras[0]);
      const TrajectoryMap expected =
          reference_flow_raster(scene, tracks, f, scene.cameras[0], kDefaultZNear);
      REQUIRE(got.data == expected.data);
    }
  }
}

TEST_CASE("static world means zero flow regardless of ego motion") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene scene = random_scene(rng, {4, 6, 64, false});  // parked instances
    const auto tracks = compute_offsets(scene);
    for (int f = 0; f < scene.frame_count(); ++f) {
      const TrajectoryMap map = rasterize_flow(scene, tracks, f, scene.cameras[0]);
      for (double v : map.data) REQUIRE(v == 0.0);
    }
  }
}

TEST_CASE("pure world translation leaves flow maps bit-identical") {
  SplitMix64 rng(33);
  Scene scene = random_scene(rng, {4, 6, 64, true});
  // Snap every world quantity to a dyadic grid so +delta is exact.
  for (auto& frame : scene.frames) {
    for (int i = 0; i < 3; ++i)
      frame.ego.translation_we[i] = snap(frame.ego.translation_we[i]);
    for (auto& ins : frame.instances)
      for (int i = 0; i < 3; ++i) ins.center_world[i] = snap(ins.center_world[i]);
  }

  const Eigen::Vector3d delta(64.0, -32.0, 8.0);
  Scene moved = scene;
  for (auto& frame : moved.frames) {
    frame.ego.translation_we += delta;
    for (auto& ins : frame.instances) ins.center_world += delta;
  }

  const auto tracks_a = compute_offsets(scene);
  const auto tracks_b = compute_offsets(moved);
  for (int f = 0; f < scene.frame_count(); ++f) {
    const TrajectoryMap a = rasterize_flow(scene, tracks_a, f, scene.cameras[0]);
    const TrajectoryMap b = rasterize_flow(moved, tracks_b, f, moved.cameras[0]);
    REQUIRE(a.data == b.data);
  }
}

TEST_CASE("normalize_to_rgb encodes the analytic anchor values") {
  TrajectoryMap map(1, "CAM", 2, 2);
  const double o_max = 3.0;
  double* p00 = map.px(0, 0);  // zero offset
  (void)p00;
  double* p10 = map.px(1, 0);
  p10[0] = o_max;
  p10[1] = -o_max;
  p10[2] = 0.0;
  double* p01 = map.px(0, 1);
  p01[0] = o_max / 2.0;  // 255 * 0.75 = 191.25 -> 191
  double* p11 = map.px(1, 1);
  p11[0] = 99.0;   // clamps to +o_max
  p11[1] = -99.0;  // clamps to -o_max

  const FlowRgb rgb = normalize_to_rgb(map, o_max);
  CHECK(rgb.pixels.get(0, 0) == Rgb8{128, 128, 128});
  CHECK(rgb.pixels.get(1, 0) == Rgb8{255, 0, 128});
  CHECK(rgb.pixels.get(0, 1).r == 191);
  CHECK(rgb.pixels.get(1, 1) == Rgb8{255, 0, 128});
}

TEST_CASE("normalize_to_rgb is monotone and inverts within quantization") {
  const double o_max = 3.0;
  TrajectoryMap map(1, "CAM", 256, 1);
  for (int x = 0; x < 256; ++x)
    map.px(x, 0)[0] = -o_max * 1.2 + x * (2.4 * o_max / 255.0);
  const FlowRgb rgb = normalize_to_rgb(map, o_max);

  int prev = -1;
  for (int x = 0; x < 256; ++x) {
    const int r = rgb.pixels.get(x, 0).r;
    CHECK(r >= prev);
    prev = r;
    const double truth = std::clamp(map.px(x, 0)[0], -o_max, o_max);
    const double decoded = decode_flow_channel(rgb.pixels.get(x, 0).r, o_max);
    CHECK(std::abs(decoded - truth) <= o_max / 255.0 + 1e-12);
  }
}

TEST_CASE("o_max must be positive") {
  TrajectoryMap map(0, "CAM", 2, 2);
  CHECK_THROWS_AS(normalize_to_rgb(map, 0.0), InvalidBound);
  CHECK_THROWS_AS(normalize_to_rgb(map, -1.0), InvalidBound);
}
