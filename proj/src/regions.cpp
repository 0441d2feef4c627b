#include "dynaip/regions.hpp"

#include <algorithm>

namespace dynaip {

const std::array<std::string, kNumSensors>& sensor_order() {
  static const std::array<std::string, kNumSensors> order = {
      "Root", "LeftLeg", "RightLeg", "Head", "LeftArm", "RightArm"};
  return order;
}

const std::array<std::string, kNumSensors>& sensor_joints_xsens23() {
  static const std::array<std::string, kNumSensors> joints = {
      "Pelvis", "LLowerLeg", "RLowerLeg", "Head", "LForeArm", "RForeArm"};
  return joints;
}

const std::array<RegionSpec, 3>& body_regions() {
  static const std::array<RegionSpec, 3> regions = {{
      {"UL_r",
       {kRoot, kLeftArm, kRightArm},
       {"LShoulder", "LUpperArm", "RShoulder", "RUpperArm"}},
      {"T_r", {kRoot, kHead}, {"L5", "L3", "T12", "T8", "Neck"}},
      {"LL_r",
       {kRoot, kLeftLeg, kRightLeg, kHead},
       {"LUpperLeg", "RUpperLeg"}},
  }};
  return regions;
}

const std::vector<std::string>& predicted_joints() {
  static const std::vector<std::string> joints = [] {
    std::vector<std::string> all;
    for (const RegionSpec& region : body_regions())
      all.insert(all.end(), region.joints.begin(), region.joints.end());
    return all;
  }();
  return joints;
}

const std::vector<std::string>& terminal_joints_xsens23() {
  static const std::vector<std::string> joints = {"RHand", "LHand", "RFoot",
                                                  "LFoot", "RToe", "LToe"};
  return joints;
}

std::vector<int> region_feature_columns(const RegionSpec& region) {
  std::vector<int> cols;
  cols.reserve(region.sensors.size() * kSensorBlock);
  for (int s : region.sensors)
    for (int k = 0; k < kSensorBlock; ++k) cols.push_back(s * kSensorBlock + k);
  return cols;
}

std::vector<int> region_velocity_components(const RegionSpec& region) {
  std::vector<int> comps;
  comps.reserve(region.sensors.size() * 3);
  for (int s : region.sensors)
    for (int k = 0; k < 3; ++k) comps.push_back(s * 3 + k);
  return comps;
}

std::vector<int> region_pose_components(const RegionSpec& region) {
  const std::vector<std::string>& all = predicted_joints();
  std::vector<int> comps;
  comps.reserve(region.joints.size() * 6);
  for (const std::string& joint : region.joints) {
    const auto it = std::find(all.begin(), all.end(), joint);
    const int j = static_cast<int>(it - all.begin());
    for (int k = 0; k < 6; ++k) comps.push_back(j * 6 + k);
  }
  return comps;
}

}  // namespace dynaip
