#pragma once

#include <cmath>
#include <stdexcept>

#include "latpush/geometry.hpp"
#include "latpush/rng.hpp"

namespace latpush {

// Hand footprint in the hand frame. The palm opening faces +x; geometry is
// symmetric about the hand x-axis. Sensors are fingertip patches and must be
// subsets of the finger footprints.
struct HandGeometry {
  Polygon palm;
  Polygon finger_left;
  Polygon finger_right;
  Polygon sensor_left;
  Polygon sensor_right;

  const Polygon& solid(int i) const {
    switch (i) {
      case 0: return palm;
      case 1: return finger_left;
      default: return finger_right;
    }
  }
  static constexpr int kSolids = 3;
};

// Palm face at x = 0, channel 8 cm wide and 8 cm deep between 2 cm fingers.
// Sensor patches cover the distal 3 cm of each finger.
inline HandGeometry default_hand() {
  HandGeometry h;
  h.palm = Polygon::rect(-0.02, -0.06, 0.00, 0.06);
  h.finger_left = Polygon::rect(0.00, 0.04, 0.08, 0.06);
  h.finger_right = Polygon::rect(0.00, -0.06, 0.08, -0.04);
  h.sensor_left = Polygon::rect(0.05, 0.04, 0.08, 0.06);
  h.sensor_right = Polygon::rect(0.05, -0.06, 0.08, -0.04);
  return h;
}

struct PhysicsParams {
  double mu_mean = 0.5;       // hand-object friction
  double mu_std = 0.1;
  double slip_gain = 1.0;
  double pressure_std = 0.005;  // meters, object-table pressure center offset
  double contact_eps = 0.001;   // meters, sensing/contact tolerance
  double substep = 0.001;       // meters, hand motion per integration substep
  double disc_radius = 0.03;    // meters, movable object
};

struct NoiseSample {
  double mu = 0.5;              // clamped to >= 0.01
  double pressure_offset = 0.0;  // meters
};

struct ContactReport {
  bool left = false;
  bool right = false;
  bool palm = false;
};

struct PenetrationUnresolvable : std::runtime_error {
  PenetrationUnresolvable()
      : std::runtime_error("physics: MTV iteration failed to separate disc from hand") {}
};

inline NoiseSample sample_noise(const PhysicsParams& params, Rng& rng) {
  NoiseSample n;
  n.mu = std::max(0.01, rng.gaussian(params.mu_mean, params.mu_std));
  n.pressure_offset = rng.gaussian(0.0, params.pressure_std);
  return n;
}

namespace detail {

// Resolve disc-hand penetration in place. Each MTV push adds a tangential
// slip of slip_gain * (pressure_offset / mu) * depth, oriented along the
// tangent that leads away from the palm centerline (the hand x-axis).
inline void resolve_penetration(Vec2& center_world, const Pose2& hand_pose,
                                const HandGeometry& hand, const NoiseSample& noise,
                                const PhysicsParams& params) {
  const Pose2 hand_inv = invert(hand_pose);
  for (int iter = 0; iter < 20; ++iter) {
    const Vec2 local = hand_inv.apply(center_world);
    const Disc d{local, params.disc_radius};
    double depth = 0.0;
    Vec2 normal;
    for (int i = 0; i < HandGeometry::kSolids; ++i) {
      if (auto pen = disc_polygon_penetration(d, hand.solid(i)); pen && pen->depth > depth) {
        depth = pen->depth;
        normal = pen->normal;
      }
    }
    if (depth <= 1e-12) return;
    Vec2 move = normal * depth;
    if (std::abs(noise.pressure_offset) > 0.0) {
      Vec2 tangent = normal.perp();
      // orient away from the centerline; side of the centerline breaks the tie
      const double side = (std::abs(local.y) > 1e-12) ? (local.y > 0.0 ? 1.0 : -1.0) : 1.0;
      if (tangent.y * side < 0.0) tangent = -tangent;
      move = move + tangent * (params.slip_gain * (noise.pressure_offset / noise.mu) * depth);
    }
    center_world = center_world + hand_pose.rotate(hand_inv.rotate(move));
  }
  // verify separation after the iteration cap
  const Vec2 local = hand_inv.apply(center_world);
  const Disc d{local, params.disc_radius};
  for (int i = 0; i < HandGeometry::kSolids; ++i)
    if (auto pen = disc_polygon_penetration(d, hand.solid(i)); pen && pen->depth > 1e-9)
      throw PenetrationUnresolvable();
}

}  // namespace detail

// Deterministic contact sensing: bit set iff the disc is within contact_eps
// of the sensor patch. Encoded as left | right << 1.
inline int sense(const Vec2& object_world, const Pose2& hand_pose, const HandGeometry& hand,
                 const PhysicsParams& params) {
  const Vec2 local = invert(hand_pose).apply(object_world);
  const double reach = params.disc_radius + params.contact_eps;
  int obs = 0;
  if (polygon_distance(hand.sensor_left, local) <= reach) obs |= 1;
  if (polygon_distance(hand.sensor_right, local) <= reach) obs |= 2;
  return obs;
}

// One quasistatic push: translate the hand by hand_delta in substeps, pushing
// the disc out by the minimal translation vector wherever it penetrates.
// The disc never moves without penetration and never rotates.
inline std::pair<Vec2, ContactReport> step(const Pose2& hand_pose, const Vec2& hand_delta,
                                           const Vec2& object_world, const NoiseSample& noise,
                                           const HandGeometry& hand, const PhysicsParams& params) {
  Vec2 center = object_world;
  const double len = hand_delta.norm();
  const int n_sub = std::max(1, int(std::ceil(len / params.substep)));
  const Vec2 sub = hand_delta * (1.0 / double(n_sub));
  Pose2 pose = hand_pose;
  for (int k = 0; k < n_sub; ++k) {
    pose = Pose2(pose.x + sub.x, pose.y + sub.y, pose.theta);
    detail::resolve_penetration(center, pose, hand, noise, params);
  }

  const Vec2 local = invert(pose).apply(center);
  const double reach = params.disc_radius + params.contact_eps;
  ContactReport contacts;
  contacts.left = polygon_distance(hand.sensor_left, local) <= reach;
  contacts.right = polygon_distance(hand.sensor_right, local) <= reach;
  contacts.palm = polygon_distance(hand.palm, local) <= reach;
  return {center, contacts};
}

}  // namespace latpush
