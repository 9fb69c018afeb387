#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <algorithm>
#include <optional>
#include <vector>

#include "doapose/common.hpp"

// SE(3) poses and the angular error functions used by every metric.
//
// Frame conventions used throughout the project:
//   * right-handed frames; camera axes: +x forward, +y left, +z up
//   * azimuth is measured counterclockwise about +z from +x (camera forward),
//     so the direction of azimuth a is u(a) = (cos a, sin a, 0)
//   * a positive yaw is a counterclockwise rotation about +z

namespace doapose {

/// Rotation stored as a unit quaternion, canonicalized so that w >= 0
/// (and, for w == 0, the first nonzero vector component is positive).
struct Rotation {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Rotation() = default;

  static Rotation identity() { return {}; }

  /// Builds from possibly unnormalized components; normalizes and
  /// canonicalizes the sign.
  static Rotation from_quat(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n < 1e-12) throw InvalidConfig("quaternion norm too small");
    Rotation r;
    r.w = w / n;
    r.x = x / n;
    r.y = y / n;
    r.z = z / n;
    r.canonicalize();
    return r;
  }

  static Rotation from_axis_angle(const Eigen::Vector3d& axis, double angle_rad) {
    const double n = axis.norm();
    if (n < 1e-12) throw InvalidConfig("rotation axis has zero norm");
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h) / n;
    return from_quat(std::cos(h), axis.x() * s, axis.y() * s, axis.z() * s);
  }

  /// Counterclockwise rotation about +z.
  static Rotation yaw_deg(double deg) {
    return from_axis_angle(Eigen::Vector3d::UnitZ(), deg2rad(deg));
  }

  Rotation inverse() const {
    Rotation r;
    r.w = w;
    r.x = -x;
    r.y = -y;
    r.z = -z;
    r.canonicalize();
    return r;
  }

  /// Hamilton product: (*this) followed-by-nothing convention, i.e. the
  /// composite rotation applying `other` first, then `*this`.
  Rotation operator*(const Rotation& o) const {
    return from_quat(w * o.w - x * o.x - y * o.y - z * o.z,
                     w * o.x + x * o.w + y * o.z - z * o.y,
                     w * o.y - x * o.z + y * o.w + z * o.x,
                     w * o.z + x * o.y - y * o.x + z * o.w);
  }

  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const {
    // q v q^-1 via the expanded cross-product form.
    const Eigen::Vector3d u(x, y, z);
    const Eigen::Vector3d t = 2.0 * u.cross(v);
    return v + w * t + u.cross(t);
  }

  Eigen::Matrix3d matrix() const {
    return Eigen::Quaterniond(w, x, y, z).toRotationMatrix();
  }

  double dot(const Rotation& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

 private:
  void canonicalize() {
    bool flip = w < 0.0;
    if (w == 0.0) {
      if (x != 0.0)
        flip = x < 0.0;
      else if (y != 0.0)
        flip = y < 0.0;
      else
        flip = z < 0.0;
    }
    if (flip) {
      w = -w;
      x = -x;
      y = -y;
      z = -z;
    }
  }
};

/// World-from-camera pose: x_world = rotation * x_camera + translation.
struct Pose {
  Rotation rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Pose of the target frame expressed in the source frame.
struct RelativePose {
  Rotation rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Relative pose such that compose(source, result) == target.
inline RelativePose relative_pose(const Pose& source, const Pose& target) {
  const Rotation inv = source.rotation.inverse();
  RelativePose rel;
  rel.rotation = inv * target.rotation;
  rel.translation = inv.rotate(target.translation - source.translation);
  return rel;
}

inline Pose compose(const Pose& base, const RelativePose& rel) {
  Pose out;
  out.rotation = base.rotation * rel.rotation;
  out.translation = base.rotation.rotate(rel.translation) + base.translation;
  return out;
}

/// Geodesic angle between two rotations, degrees in [0, 180].
inline double rotation_error_deg(const Rotation& a, const Rotation& b) {
  const double d = std::clamp(std::abs(a.dot(b)), 0.0, 1.0);
  return rad2deg(2.0 * std::acos(d));
}

/// Angle between two translation directions, degrees in [0, 180].
/// Returns nullopt when either vector is shorter than 1e-9 (degenerate);
/// the eval layer decides how degenerate pairs score.
inline std::optional<double> translation_angle_error_deg(const Eigen::Vector3d& a,
                                                         const Eigen::Vector3d& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-9 || nb < 1e-9) return std::nullopt;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return rad2deg(std::acos(c));
}

/// Azimuth of the rotated forward axis (+x) projected on the ground plane,
/// degrees in [0, 360). Throws GimbalDegenerate when the forward axis is
/// within 1e-6 of vertical.
inline double yaw_of(const Rotation& r) {
  const Eigen::Vector3d f = r.rotate(Eigen::Vector3d::UnitX());
  if (std::hypot(f.x(), f.y()) < 1e-6)
    throw GimbalDegenerate("forward axis is vertical, yaw undefined");
  return wrap_deg_unsigned(rad2deg(std::atan2(f.y(), f.x())));
}

/// Chordal L2 mean of a set of rotations: average of the canonical (w >= 0)
/// quaternions, renormalized. Canonicalization doubles as the sign alignment,
/// which keeps the result independent of input order.
inline Rotation mean_rotation(const std::vector<Rotation>& rs) {
  if (rs.empty()) throw EmptyInput("mean_rotation over empty sequence");
  double w = 0, x = 0, y = 0, z = 0;
  for (const Rotation& r : rs) {
    w += r.w;
    x += r.x;
    y += r.y;
    z += r.z;
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  // Antipodal inputs can cancel; fall back to the first element.
  if (n < 1e-9) return rs.front();
  return Rotation::from_quat(w, x, y, z);
}

}  // namespace doapose
