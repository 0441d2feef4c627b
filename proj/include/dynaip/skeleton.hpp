#pragma once

#include "dynaip/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dynaip {

/// Named joint hierarchy with rest-pose bone offsets. Joints are listed in
/// topological order: every joint's parent index is smaller than its own,
/// and exactly one joint (the root) has parent -1. Offsets are the bone
/// displacement from the parent joint, expressed in the parent's frame, in
/// meters.
struct SkeletonSpec {
  std::string name;
  std::vector<std::string> joints;
  std::vector<int> parent;
  std::vector<Vec3> offset;

  int joint_count() const { return static_cast<int>(joints.size()); }

  /// Index of a joint by name; throws UnknownJoint.
  int index_of(const std::string& joint) const;

  /// Index of a joint by name, or -1 when absent.
  int find(const std::string& joint) const;

  /// Throws ValidationError unless the hierarchy invariants hold.
  void validate() const;
};

/// Per-frame global (world-frame) joint rotations at a fixed frame rate.
struct PoseSequence {
  SkeletonSpec skeleton;
  double fps = 0.0;
  std::vector<Mat3> rotations;  // [frame * joint_count + joint]

  int frames() const {
    const int j = skeleton.joint_count();
    return j > 0 ? static_cast<int>(rotations.size()) / j : 0;
  }
  Mat3& rot(int frame, int joint) {
    return rotations[static_cast<size_t>(frame) * skeleton.joint_count() + joint];
  }
  const Mat3& rot(int frame, int joint) const {
    return rotations[static_cast<size_t>(frame) * skeleton.joint_count() + joint];
  }
  std::span<const Mat3> frame(int t) const {
    return {rotations.data() + static_cast<size_t>(t) * skeleton.joint_count(),
            static_cast<size_t>(skeleton.joint_count())};
  }
};

/// Cross-skeleton global-orientation mapping: each destination joint copies
/// the global rotation of one source joint verbatim. `pairs` are the primary
/// (source, destination) assignments, `dropped` lists source joints with no
/// destination, and `duplicated` lists extra destinations that reuse an
/// already-mapped source.
struct JointMapping {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> dropped;
  std::vector<std::pair<std::string, std::string>> duplicated;
};

/// Fixed rosters for the two supported formats: "xsens23" and "smpl24".
/// Throws UnknownSkeleton otherwise.
SkeletonSpec builtin_skeleton(const std::string& name);

/// Built-in mapping between the builtin skeletons, either direction.
/// xsens23 -> smpl24 drops the redundant torso joint (L3) and fills the SMPL
/// hand joints from the wrists; smpl24 -> xsens23 duplicates Spine1 into both
/// L5 and L3 and drops the SMPL hands.
JointMapping builtin_mapping(const std::string& from, const std::string& to);

/// Parse a skeleton from a text table, one joint per line:
///   name parent_name offset_x offset_y offset_z
/// The root uses parent_name "none". Lines starting with '#' are skipped.
SkeletonSpec skeleton_from_table(std::istream& in, const std::string& name);
SkeletonSpec load_skeleton_table(const std::string& path);
void write_skeleton_table(std::ostream& out, const SkeletonSpec& spec);

/// World positions of every joint for one frame of global rotations.
/// The root is pinned at the origin; for every other joint
///   p_j = p_parent + R_parent * offset_j.
std::vector<Vec3> forward_kinematics(const SkeletonSpec& spec,
                                     std::span<const Mat3> frame);

/// Retarget a pose sequence onto another skeleton by copying global joint
/// rotations through the mapping. Throws IncompleteMapping when a destination
/// joint is not covered exactly once.
PoseSequence map_pose(const PoseSequence& src, const JointMapping& mapping,
                      const SkeletonSpec& dst_spec);

/// Per-frame speed (m/s) of one joint's FK position; first frame is 0.
std::vector<double> end_effector_speed(const PoseSequence& seq,
                                       const std::string& joint);

}  // namespace dynaip
