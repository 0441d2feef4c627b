#pragma once

#include "dynaip/skeleton.hpp"

#include <array>
#include <string>
#include <vector>

namespace dynaip {

// Six sensors, fixed order. Each sensor block contributes 9 orientation +
// 3 acceleration components to the 72-wide per-frame feature vector.
inline constexpr int kNumSensors = 6;
inline constexpr int kSensorBlock = 12;
inline constexpr int kFeatureDim = kNumSensors * kSensorBlock;  // 72
inline constexpr int kVelDim = kNumSensors * 3;                 // 18

enum Sensor : int {
  kRoot = 0,
  kLeftLeg = 1,
  kRightLeg = 2,
  kHead = 3,
  kLeftArm = 4,
  kRightArm = 5,
};

const std::array<std::string, kNumSensors>& sensor_order();

/// Xsens-23 joints the six sensors are mounted on, in sensor order.
const std::array<std::string, kNumSensors>& sensor_joints_xsens23();

/// One body region: the sensor subset feeding its branch and the joints the
/// branch predicts.
struct RegionSpec {
  std::string name;
  std::vector<int> sensors;          // indices into sensor_order()
  std::vector<std::string> joints;   // predicted xsens23 joints
};

/// The three regions: UL_r (upper limbs), T_r (torso), LL_r (lower limbs).
/// Predicted joints partition the 11 xsens23 joints without sensors that are
/// not terminal.
const std::array<RegionSpec, 3>& body_regions();

/// The 11 predicted joints, concatenated in region order UL_r, T_r, LL_r.
/// This fixes the column layout of 66-wide pose targets (6 values per joint).
const std::vector<std::string>& predicted_joints();
inline constexpr int kNumPredictedJoints = 11;
inline constexpr int kPoseDim = kNumPredictedJoints * 6;  // 66

/// Terminal joints whose global rotation is inherited from their parent.
const std::vector<std::string>& terminal_joints_xsens23();

/// Feature-vector column indices of a region's sensor blocks (12 per sensor).
std::vector<int> region_feature_columns(const RegionSpec& region);

/// Velocity-vector component indices of a region's sensors (3 per sensor).
std::vector<int> region_velocity_components(const RegionSpec& region);

/// Pose-target component indices of a region's joints (6 per joint).
std::vector<int> region_pose_components(const RegionSpec& region);

}  // namespace dynaip
