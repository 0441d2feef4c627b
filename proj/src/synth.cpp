#include "dynaip/synth.hpp"

#include "dynaip/rotmath.hpp"

#include <algorithm>
#include <cmath>

namespace dynaip {

ImuFrame imu_frame(const ImuSequence& seq, int t) {
  ImuFrame f;
  for (int s = 0; s < kNumSensors; ++s) {
    f.ori[s] = seq.ori(t, s);
    f.acc[s] = seq.acc(t, s);
  }
  return f;
}

ImuSequence synthesize_imu(
    const PoseSequence& pose,
    const std::array<std::string, kNumSensors>& sensor_joints,
    int smoothing_radius) {
  const int k = smoothing_radius;
  const int frames = pose.frames();
  if (k < 1) throw DegenerateInput("synthesize_imu: smoothing radius must be >= 1");
  if (frames < 2 * k + 1)
    throw TooShort("synthesize_imu: need at least " + std::to_string(2 * k + 1) +
                   " frames, got " + std::to_string(frames));
  std::array<int, kNumSensors> joint;
  for (int s = 0; s < kNumSensors; ++s)
    joint[s] = pose.skeleton.index_of(sensor_joints[s]);

  ImuSequence imu;
  imu.fps = pose.fps;
  imu.orientations.resize(static_cast<size_t>(frames) * kNumSensors);
  imu.accelerations.resize(static_cast<size_t>(frames) * kNumSensors);

  std::vector<std::array<Vec3, kNumSensors>> positions(frames);
  for (int t = 0; t < frames; ++t) {
    const std::vector<Vec3> all = forward_kinematics(pose.skeleton, pose.frame(t));
    for (int s = 0; s < kNumSensors; ++s) {
      positions[t][s] = all[joint[s]];
      imu.ori(t, s) = pose.rot(t, joint[s]);
    }
  }

  const double dt = static_cast<double>(k) / pose.fps;
  const double inv_dt2 = 1.0 / (dt * dt);
  for (int t = k; t < frames - k; ++t)
    for (int s = 0; s < kNumSensors; ++s)
      imu.acc(t, s) =
          (positions[t - k][s] - 2.0 * positions[t][s] + positions[t + k][s]) *
          inv_dt2;
  for (int t = 0; t < k; ++t)
    for (int s = 0; s < kNumSensors; ++s) imu.acc(t, s) = imu.acc(k, s);
  for (int t = frames - k; t < frames; ++t)
    for (int s = 0; s < kNumSensors; ++s)
      imu.acc(t, s) = imu.acc(frames - k - 1, s);
  return imu;
}

double yaw_of(const Mat3& r) {
  // Heading of the rotated X axis projected onto the ground plane.
  return std::atan2(r(1, 0), r(0, 0));
}

VecX normalize_imu_frame(const ImuFrame& raw, bool yaw_canonical) {
  const Mat3& root = raw.ori[kRoot];
  const Mat3 root_t = root.transpose();
  VecX out(kFeatureDim);
  for (int s = 0; s < kNumSensors; ++s) {
    Mat3 block;
    Vec3 acc;
    if (s == kRoot) {
      block = yaw_canonical ? Mat3(rot_z(-yaw_of(root)) * root) : root;
      acc = root_t * raw.acc[kRoot];
    } else {
      block = root_t * raw.ori[s];
      acc = root_t * (raw.acc[s] - raw.acc[kRoot]);
    }
    out.segment<9>(s * kSensorBlock) = flatten_rowmajor(block);
    out.segment<3>(s * kSensorBlock + 9) = acc;
  }
  return out;
}

MatX normalize_imu(const ImuSequence& seq, bool yaw_canonical) {
  const int frames = seq.frames();
  MatX out(frames, kFeatureDim);
  for (int t = 0; t < frames; ++t)
    out.row(t) = normalize_imu_frame(imu_frame(seq, t), yaw_canonical).transpose();
  return out;
}

std::array<Mat3, kNumSensors> sensor_orientations_from_features(
    const VecX& features) {
  if (features.size() != kFeatureDim)
    throw ShapeMismatch("feature vector must have 72 components, got " +
                        std::to_string(features.size()));
  std::array<Mat3, kNumSensors> ori;
  const Mat3 root = unflatten_rowmajor(features.segment<9>(0));
  ori[kRoot] = root;
  for (int s = 1; s < kNumSensors; ++s)
    ori[s] = root * unflatten_rowmajor(features.segment<9>(s * kSensorBlock));
  return ori;
}

}  // namespace dynaip
