#pragma once

#include "dynaip/synth.hpp"

#include <optional>
#include <vector>

namespace dynaip {

/// One sequence loaded from disk: ground-truth pose plus, when present, the
/// recorded or synthesized IMU channels.
struct SequenceData {
  PoseSequence pose;
  std::optional<ImuSequence> imu;
};

/// Read a sequence file, auto-detecting the framed binary variant by magic
/// and falling back to the JSON document otherwise. Rotation blocks are
/// checked for orthonormality (1e-6) and the joint order must match a known
/// skeleton.
SequenceData read_sequence_file(const std::string& path);

/// Write a sequence file; `binary` selects the framed little-endian variant.
void write_sequence_file(const std::string& path, const PoseSequence& pose,
                         const ImuSequence* imu = nullptr, bool binary = false);

/// Ground-truth sensor-joint velocities, frames x 18 (6 sensors x 3).
/// V_t = (FK(theta_t) - FK(theta_{t-1})) * fps at the sensor joints; frame 0
/// is zero. Non-root entries are rotated into the frame-t root frame; the
/// root entry keeps only its world vertical component.
MatX gt_velocity(const PoseSequence& pose,
                 const std::array<std::string, kNumSensors>& sensor_joints);

/// One fixed-length training window.
struct TrainingChunk {
  MatX inputs;    // window x 72 normalized features
  MatX gt_pose;   // window x 66 root-relative 6D targets, region order
  MatX gt_vel;    // window x 18 velocity targets
  VecX init_vel;  // first-frame velocities (18)
  VecX init_pose; // first-frame pose targets (66)
};

/// Root-relative 6D pose targets for the 11 predicted joints, frames x 66.
MatX pose_targets(const PoseSequence& pose);

/// Cut a sequence into consecutive non-overlapping windows; the final
/// partial window is dropped. Pose and IMU must have equal frame counts.
std::vector<TrainingChunk> make_training_chunks(const PoseSequence& pose,
                                                const ImuSequence& imu,
                                                int window = 300,
                                                bool yaw_canonical = false);

/// Train/test sequence paths.
struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

SplitManifest read_split_manifest(const std::string& path);
void write_split_manifest(const std::string& path, const SplitManifest& manifest);

}  // namespace dynaip
