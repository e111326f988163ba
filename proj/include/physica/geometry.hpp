#pragma once

#include "physica/scene.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace physica {

/// Near plane for pinhole projection, meters. Points with camera z below this
/// are reported invalid instead of blowing up projectively.
constexpr double kDefaultZNear = 0.1;

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }

  /// this ∘ other: apply other first, then this.
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

/// Corner order is the bit pattern 000..111 over the (x, y, z) sign triple in
/// the box frame: bit 2 = x sign, bit 1 = y sign, bit 0 = z sign, 0 meaning
/// the negative half-extent.
struct BoxCorners {
  std::array<Eigen::Vector3d, 8> corners;
};

struct FourierSpec {
  int num_frequencies = 8;  // frequencies 2^0*pi .. 2^(L-1)*pi

  int output_dim(int input_dim) const { return 2 * num_frequencies * input_dim; }
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool valid = false;
};

inline Eigen::Vector3d world_to_vehicle(const Eigen::Vector3d& point_world, const EgoPose& ego) {
  return ego.rotation_we.transpose() * (point_world - ego.translation_we);
}

inline Eigen::Vector3d vehicle_to_world(const Eigen::Vector3d& point_vehicle, const EgoPose& ego) {
  return ego.rotation_we * point_vehicle + ego.translation_we;
}

inline Eigen::Vector3d vehicle_to_camera(const Eigen::Vector3d& point_vehicle,
                                         const CameraRig& cam) {
  return cam.R * point_vehicle + cam.T;
}

Projection project(const Eigen::Vector3d& point_camera, const CameraRig& cam,
                   double z_near = kDefaultZNear);

BoxCorners box_corners(const Instance& instance);

/// Per scalar x: sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^(L-1) pi x),
/// cos(2^(L-1) pi x), concatenated in input order.
std::vector<double> fourier_embed(const std::vector<double>& x, const FourierSpec& spec);

inline Eigen::Matrix3d yaw_rotation(double yaw) {
  Eigen::Matrix3d r;
  const double c = std::cos(yaw), s = std::sin(yaw);
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

}  // namespace physica
