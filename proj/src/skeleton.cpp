#include "dynaip/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dynaip {

int SkeletonSpec::find(const std::string& joint) const {
  auto it = std::find(joints.begin(), joints.end(), joint);
  return it == joints.end() ? -1 : static_cast<int>(it - joints.begin());
}

int SkeletonSpec::index_of(const std::string& joint) const {
  const int i = find(joint);
  if (i < 0)
    throw UnknownJoint("skeleton '" + name + "' has no joint '" + joint + "'");
  return i;
}

void SkeletonSpec::validate() const {
  const size_t n = joints.size();
  if (n == 0) throw ValidationError("skeleton '" + name + "': no joints");
  if (parent.size() != n || offset.size() != n)
    throw ValidationError("skeleton '" + name + "': field sizes disagree");
  int roots = 0;
  for (size_t j = 0; j < n; ++j) {
    if (parent[j] < 0) {
      ++roots;
    } else if (parent[j] >= static_cast<int>(j)) {
      throw ValidationError("skeleton '" + name +
                            "': joints are not topologically sorted at '" +
                            joints[j] + "'");
    }
    if (!offset[j].allFinite())
      throw ValidationError("skeleton '" + name + "': non-finite offset at '" +
                            joints[j] + "'");
  }
  if (roots != 1)
    throw ValidationError("skeleton '" + name + "': expected exactly one root");
  std::set<std::string> unique(joints.begin(), joints.end());
  if (unique.size() != n)
    throw ValidationError("skeleton '" + name + "': duplicate joint names");
}

namespace {

struct JointRow {
  const char* name;
  const char* parent;
  double x, y, z;
};

// Neutral-stature rest pose, Z up, X forward, arms in T-pose along +/-Y.
// Corresponding limb segments carry the same lengths in both rosters so a
// retargeted pose reproduces end-effector trajectories.
constexpr JointRow kXsens23[] = {
    {"Pelvis", "none", 0.0, 0.0, 0.0},
    {"L5", "Pelvis", 0.0, 0.0, 0.10},
    {"L3", "L5", 0.0, 0.0, 0.10},
    {"T12", "L3", 0.0, 0.0, 0.10},
    {"T8", "T12", 0.0, 0.0, 0.10},
    {"Neck", "T8", 0.0, 0.0, 0.15},
    {"Head", "Neck", 0.0, 0.0, 0.10},
    {"RShoulder", "T8", 0.0, -0.10, 0.10},
    {"RUpperArm", "RShoulder", 0.0, -0.15, 0.0},
    {"RForeArm", "RUpperArm", 0.0, -0.30, 0.0},
    {"RHand", "RForeArm", 0.0, -0.25, 0.0},
    {"LShoulder", "T8", 0.0, 0.10, 0.10},
    {"LUpperArm", "LShoulder", 0.0, 0.15, 0.0},
    {"LForeArm", "LUpperArm", 0.0, 0.30, 0.0},
    {"LHand", "LForeArm", 0.0, 0.25, 0.0},
    {"RUpperLeg", "Pelvis", 0.0, -0.10, 0.0},
    {"RLowerLeg", "RUpperLeg", 0.0, 0.0, -0.45},
    {"RFoot", "RLowerLeg", 0.0, 0.0, -0.45},
    {"RToe", "RFoot", 0.15, 0.0, -0.07},
    {"LUpperLeg", "Pelvis", 0.0, 0.10, 0.0},
    {"LLowerLeg", "LUpperLeg", 0.0, 0.0, -0.45},
    {"LFoot", "LLowerLeg", 0.0, 0.0, -0.45},
    {"LToe", "LFoot", 0.15, 0.0, -0.07},
};

// Standard 24-joint SMPL roster. The single Spine1->Spine2 segment absorbs
// the two Xsens lumbar segments so torso path lengths match.
constexpr JointRow kSmpl24[] = {
    {"Pelvis", "none", 0.0, 0.0, 0.0},
    {"L_Hip", "Pelvis", 0.0, 0.10, 0.0},
    {"R_Hip", "Pelvis", 0.0, -0.10, 0.0},
    {"Spine1", "Pelvis", 0.0, 0.0, 0.10},
    {"L_Knee", "L_Hip", 0.0, 0.0, -0.45},
    {"R_Knee", "R_Hip", 0.0, 0.0, -0.45},
    {"Spine2", "Spine1", 0.0, 0.0, 0.20},
    {"L_Ankle", "L_Knee", 0.0, 0.0, -0.45},
    {"R_Ankle", "R_Knee", 0.0, 0.0, -0.45},
    {"Spine3", "Spine2", 0.0, 0.0, 0.10},
    {"L_Foot", "L_Ankle", 0.15, 0.0, -0.07},
    {"R_Foot", "R_Ankle", 0.15, 0.0, -0.07},
    {"Neck", "Spine3", 0.0, 0.0, 0.15},
    {"L_Collar", "Spine3", 0.0, 0.10, 0.10},
    {"R_Collar", "Spine3", 0.0, -0.10, 0.10},
    {"Head", "Neck", 0.0, 0.0, 0.10},
    {"L_Shoulder", "L_Collar", 0.0, 0.15, 0.0},
    {"R_Shoulder", "R_Collar", 0.0, -0.15, 0.0},
    {"L_Elbow", "L_Shoulder", 0.0, 0.30, 0.0},
    {"R_Elbow", "R_Shoulder", 0.0, -0.30, 0.0},
    {"L_Wrist", "L_Elbow", 0.0, 0.25, 0.0},
    {"R_Wrist", "R_Elbow", 0.0, -0.25, 0.0},
    {"L_Hand", "L_Wrist", 0.0, 0.08, 0.0},
    {"R_Hand", "R_Wrist", 0.0, -0.08, 0.0},
};

SkeletonSpec from_rows(const std::string& name, std::span<const JointRow> rows) {
  SkeletonSpec spec;
  spec.name = name;
  spec.joints.reserve(rows.size());
  for (const JointRow& row : rows) {
    const std::string parent_name = row.parent;
    int parent = -1;
    if (parent_name != "none") {
      auto it = std::find(spec.joints.begin(), spec.joints.end(), parent_name);
      parent = static_cast<int>(it - spec.joints.begin());
    }
    spec.joints.emplace_back(row.name);
    spec.parent.push_back(parent);
    spec.offset.emplace_back(row.x, row.y, row.z);
  }
  spec.validate();
  return spec;
}

// Limb, head and foot chains correspond 1:1; L3 has no SMPL counterpart.
constexpr std::pair<const char*, const char*> kXsensToSmpl[] = {
    {"Pelvis", "Pelvis"},       {"L5", "Spine1"},
    {"T12", "Spine2"},          {"T8", "Spine3"},
    {"Neck", "Neck"},           {"Head", "Head"},
    {"RShoulder", "R_Collar"},  {"RUpperArm", "R_Shoulder"},
    {"RForeArm", "R_Elbow"},    {"RHand", "R_Wrist"},
    {"LShoulder", "L_Collar"},  {"LUpperArm", "L_Shoulder"},
    {"LForeArm", "L_Elbow"},    {"LHand", "L_Wrist"},
    {"RUpperLeg", "R_Hip"},     {"RLowerLeg", "R_Knee"},
    {"RFoot", "R_Ankle"},       {"RToe", "R_Foot"},
    {"LUpperLeg", "L_Hip"},     {"LLowerLeg", "L_Knee"},
    {"LFoot", "L_Ankle"},       {"LToe", "L_Foot"},
};

}  // namespace

SkeletonSpec builtin_skeleton(const std::string& name) {
  if (name == "xsens23") return from_rows(name, kXsens23);
  if (name == "smpl24") return from_rows(name, kSmpl24);
  throw UnknownSkeleton("unknown skeleton '" + name + "'");
}

JointMapping builtin_mapping(const std::string& from, const std::string& to) {
  JointMapping m;
  if (from == "xsens23" && to == "smpl24") {
    for (const auto& [src, dst] : kXsensToSmpl) m.pairs.emplace_back(src, dst);
    m.dropped = {"L3"};
    m.duplicated = {{"LHand", "L_Hand"}, {"RHand", "R_Hand"}};
    return m;
  }
  if (from == "smpl24" && to == "xsens23") {
    for (const auto& [dst, src] : kXsensToSmpl) m.pairs.emplace_back(src, dst);
    m.dropped = {"L_Hand", "R_Hand"};
    m.duplicated = {{"Spine1", "L3"}};
    return m;
  }
  throw UnknownSkeleton("no builtin mapping from '" + from + "' to '" + to +
                        "'");
}

SkeletonSpec skeleton_from_table(std::istream& in, const std::string& name) {
  SkeletonSpec spec;
  spec.name = name;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    std::string joint, parent_name;
    Vec3 offset;
    if (!(row >> joint >> parent_name >> offset.x() >> offset.y() >>
          offset.z()))
      throw ParseError("skeleton table line " + std::to_string(lineno) +
                       ": expected 'name parent x y z'");
    int parent = -1;
    if (parent_name != "none") {
      parent = spec.find(parent_name);
      if (parent < 0)
        throw ParseError("skeleton table line " + std::to_string(lineno) +
                         ": parent '" + parent_name +
                         "' not defined above its child");
    }
    spec.joints.push_back(joint);
    spec.parent.push_back(parent);
    spec.offset.push_back(offset);
  }
  spec.validate();
  return spec;
}

SkeletonSpec load_skeleton_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open skeleton table '" + path + "'");
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return skeleton_from_table(in, name);
}

void write_skeleton_table(std::ostream& out, const SkeletonSpec& spec) {
  out << "# joint parent offset_x offset_y offset_z (meters)\n";
  for (int j = 0; j < spec.joint_count(); ++j) {
    const std::string parent =
        spec.parent[j] < 0 ? "none" : spec.joints[spec.parent[j]];
    out << spec.joints[j] << ' ' << parent << ' ' << spec.offset[j].x() << ' '
        << spec.offset[j].y() << ' ' << spec.offset[j].z() << '\n';
  }
}

std::vector<Vec3> forward_kinematics(const SkeletonSpec& spec,
                                     std::span<const Mat3> frame) {
  const int n = spec.joint_count();
  if (static_cast<int>(frame.size()) != n)
    throw ShapeMismatch("forward_kinematics: frame has " +
                        std::to_string(frame.size()) + " rotations, skeleton '" +
                        spec.name + "' has " + std::to_string(n) + " joints");
  std::vector<Vec3> pos(n);
  for (int j = 0; j < n; ++j) {
    const int p = spec.parent[j];
    pos[j] = p < 0 ? Vec3::Zero() : Vec3(pos[p] + frame[p] * spec.offset[j]);
  }
  return pos;
}

PoseSequence map_pose(const PoseSequence& src, const JointMapping& mapping,
                      const SkeletonSpec& dst_spec) {
  const SkeletonSpec& s = src.skeleton;
  const int dst_n = dst_spec.joint_count();
  // src joint feeding each destination joint; exactly one cover required
  std::vector<int> source(dst_n, -1);
  auto assign = [&](const std::string& src_name, const std::string& dst_name) {
    const int d = dst_spec.index_of(dst_name);
    if (source[d] >= 0)
      throw IncompleteMapping("destination joint '" + dst_name +
                              "' mapped more than once");
    source[d] = s.index_of(src_name);
  };
  for (const auto& [a, b] : mapping.pairs) assign(a, b);
  for (const auto& [a, b] : mapping.duplicated) assign(a, b);
  for (int d = 0; d < dst_n; ++d)
    if (source[d] < 0)
      throw IncompleteMapping("destination joint '" + dst_spec.joints[d] +
                              "' not covered by the mapping");

  PoseSequence out;
  out.skeleton = dst_spec;
  out.fps = src.fps;
  const int frames = src.frames();
  out.rotations.resize(static_cast<size_t>(frames) * dst_n);
  for (int t = 0; t < frames; ++t)
    for (int d = 0; d < dst_n; ++d) out.rot(t, d) = src.rot(t, source[d]);
  return out;
}

std::vector<double> end_effector_speed(const PoseSequence& seq,
                                       const std::string& joint) {
  const int j = seq.skeleton.index_of(joint);
  const int frames = seq.frames();
  if (frames < 2)
    throw TooShort("end_effector_speed needs at least 2 frames");
  std::vector<double> speed(frames, 0.0);
  Vec3 prev = forward_kinematics(seq.skeleton, seq.frame(0))[j];
  for (int t = 1; t < frames; ++t) {
    const Vec3 cur = forward_kinematics(seq.skeleton, seq.frame(t))[j];
    speed[t] = (cur - prev).norm() * seq.fps;
    prev = cur;
  }
  return speed;
}

}  // namespace dynaip
