#pragma once

#include "dynaip/regions.hpp"
#include "dynaip/skeleton.hpp"

#include <array>

namespace dynaip {

/// Per-frame orientation and free acceleration for the six sensors.
/// Orientations are global (world frame); accelerations are free (gravity
/// removed) and expressed in the world frame.
struct ImuSequence {
  double fps = 0.0;
  std::vector<Mat3> orientations;  // [frame * 6 + sensor]
  std::vector<Vec3> accelerations;

  int frames() const { return static_cast<int>(orientations.size()) / kNumSensors; }
  Mat3& ori(int frame, int sensor) {
    return orientations[static_cast<size_t>(frame) * kNumSensors + sensor];
  }
  const Mat3& ori(int frame, int sensor) const {
    return orientations[static_cast<size_t>(frame) * kNumSensors + sensor];
  }
  Vec3& acc(int frame, int sensor) {
    return accelerations[static_cast<size_t>(frame) * kNumSensors + sensor];
  }
  const Vec3& acc(int frame, int sensor) const {
    return accelerations[static_cast<size_t>(frame) * kNumSensors + sensor];
  }
};

/// One frame of raw IMU readings.
struct ImuFrame {
  std::array<Mat3, kNumSensors> ori;
  std::array<Vec3, kNumSensors> acc;
};

ImuFrame imu_frame(const ImuSequence& seq, int t);

/// Synthesize virtual IMU readings from a pose sequence. Orientations are
/// the sensor joints' global bone rotations copied verbatim; accelerations
/// are the smoothed second difference of the joints' FK positions,
///   a_t = (p_{t-k} - 2 p_t + p_{t+k}) / (k / fps)^2,
/// which is exact on quadratic trajectories. Frames within k of either end
/// copy the nearest interior value.
ImuSequence synthesize_imu(const PoseSequence& pose,
                           const std::array<std::string, kNumSensors>& sensor_joints,
                           int smoothing_radius = 4);

/// Canonicalize one IMU frame into the 72-wide model feature vector:
/// per sensor, in order [Root, LeftLeg, RightLeg, Head, LeftArm, RightArm],
/// 9 orientation values (row-major) then 3 acceleration values. Non-root
/// orientations are root-relative (R_root^T R_s) and non-root accelerations
/// root-frame (R_root^T (a_s - a_root)). The root block keeps the raw root
/// orientation, so gravity direction stays visible to the model, and the
/// root acceleration in the root frame. With yaw_canonical the heading
/// (rotation about world up) is removed from the root orientation block,
/// making the whole vector invariant to a global heading change.
VecX normalize_imu_frame(const ImuFrame& raw, bool yaw_canonical = false);

/// All frames of a sequence, rows are normalized feature vectors.
MatX normalize_imu(const ImuSequence& seq, bool yaw_canonical = false);

/// Recover raw world-frame sensor orientations from a feature vector.
/// With yaw-canonicalized features the heading component is unrecoverable;
/// the reconstruction then carries the canonical heading instead.
std::array<Mat3, kNumSensors> sensor_orientations_from_features(const VecX& features);

/// Heading rotation (about world up) of an orientation.
double yaw_of(const Mat3& r);

}  // namespace dynaip
