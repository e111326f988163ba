#include "physica/geometry.hpp"

#include <cmath>
#include <numbers>

namespace physica {

Projection project(const Eigen::Vector3d& point_camera, const CameraRig& cam, double z_near) {
  Projection out;
  const double z = point_camera.z();
  out.valid = z >= z_near;
  if (!out.valid) return out;
  out.u = cam.K(0, 0) * point_camera.x() / z + cam.K(0, 2);
  out.v = cam.K(1, 1) * point_camera.y() / z + cam.K(1, 2);
  out.depth = z;
  return out;
}

BoxCorners box_corners(const Instance& instance) {
  const Eigen::Matrix3d rz = yaw_rotation(instance.yaw_world);
  const Eigen::Vector3d half = instance.size * 0.5;
  BoxCorners out;
  for (int c = 0; c < 8; ++c) {
    const double sx = (c & 4) ? 1.0 : -1.0;
    const double sy = (c & 2) ? 1.0 : -1.0;
    const double sz = (c & 1) ? 1.0 : -1.0;
    const Eigen::Vector3d local(sx * half.x(), sy * half.y(), sz * half.z());
    out.corners[c] = instance.center_world + rz * local;
  }
  return out;
}

std::vector<double> fourier_embed(const std::vector<double>& x, const FourierSpec& spec) {
  std::vector<double> out;
  out.reserve(x.size() * 2 * spec.num_frequencies);
  for (double xi : x) {
    double freq = std::numbers::pi;
    for (int l = 0; l < spec.num_frequencies; ++l) {
      out.push_back(std::sin(freq * xi));
      out.push_back(std::cos(freq * xi));
      freq *= 2.0;
    }
  }
  return out;
}

}  // namespace physica
