#include "dynaip/data.hpp"

#include "dynaip/rotmath.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

namespace dynaip {

namespace {

using nlohmann::json;

constexpr char kBinaryMagic[8] = {'D', 'I', 'P', 'S', 'E', 'Q', '1', '\n'};
constexpr double kRotationFileTol = 1e-6;

void validate_rotation_block(const Mat3& m, const std::string& where) {
  if (!is_rotation(m, kRotationFileTol))
    throw ValidationError("invalid rotation block at " + where);
}

SkeletonSpec skeleton_for(const std::string& name,
                          const std::vector<std::string>& joint_order) {
  SkeletonSpec spec = builtin_skeleton(name);
  if (joint_order != spec.joints)
    throw ValidationError("joint_order does not match skeleton '" + name + "'");
  return spec;
}

json pose_to_json(const PoseSequence& pose, const ImuSequence* imu) {
  json doc;
  doc["format_version"] = 1;
  doc["skeleton"] = pose.skeleton.name;
  doc["fps"] = pose.fps;
  doc["joint_order"] = pose.skeleton.joints;
  const int frames = pose.frames();
  const int joints = pose.skeleton.joint_count();
  json rot = json::array();
  for (int t = 0; t < frames; ++t) {
    json frame = json::array();
    for (int j = 0; j < joints; ++j) {
      const Vec9 v = flatten_rowmajor(pose.rot(t, j));
      json block = json::array();
      for (int k = 0; k < 9; ++k) block.push_back(v[k]);
      frame.push_back(std::move(block));
    }
    rot.push_back(std::move(frame));
  }
  doc["rotations"] = std::move(rot);
  if (imu) {
    json im;
    im["sensor_order"] = sensor_order();
    json ori = json::array(), acc = json::array();
    for (int t = 0; t < imu->frames(); ++t) {
      json of = json::array(), af = json::array();
      for (int s = 0; s < kNumSensors; ++s) {
        const Vec9 v = flatten_rowmajor(imu->ori(t, s));
        json block = json::array();
        for (int k = 0; k < 9; ++k) block.push_back(v[k]);
        of.push_back(std::move(block));
        af.push_back(json::array({imu->acc(t, s).x(), imu->acc(t, s).y(),
                                  imu->acc(t, s).z()}));
      }
      ori.push_back(std::move(of));
      acc.push_back(std::move(af));
    }
    im["orientations"] = std::move(ori);
    im["accelerations"] = std::move(acc);
    doc["imu"] = std::move(im);
  }
  return doc;
}

SequenceData pose_from_json(const json& doc, const std::string& path) {
  SequenceData data;
  try {
    if (doc.at("format_version").get<int>() != 1)
      throw ValidationError("unsupported format_version in '" + path + "'");
    data.pose.skeleton =
        skeleton_for(doc.at("skeleton").get<std::string>(),
                     doc.at("joint_order").get<std::vector<std::string>>());
    data.pose.fps = doc.at("fps").get<double>();
    if (!(data.pose.fps > 0))
      throw ValidationError("fps must be positive in '" + path + "'");

    const json& rot = doc.at("rotations");
    const int joints = data.pose.skeleton.joint_count();
    const int frames = static_cast<int>(rot.size());
    if (frames < 1) throw ValidationError("empty rotations in '" + path + "'");
    data.pose.rotations.reserve(static_cast<size_t>(frames) * joints);
    for (int t = 0; t < frames; ++t) {
      if (static_cast<int>(rot[t].size()) != joints)
        throw ValidationError("rotation row " + std::to_string(t) +
                              " has wrong joint count in '" + path + "'");
      for (int j = 0; j < joints; ++j) {
        const json& block = rot[t][j];
        if (block.size() != 9)
          throw ValidationError("rotation block is not 9 values in '" + path +
                                "'");
        Vec9 v;
        for (int k = 0; k < 9; ++k) v[k] = block[k].get<double>();
        Mat3 m = unflatten_rowmajor(v);
        validate_rotation_block(m, "frame " + std::to_string(t) + " joint " +
                                       std::to_string(j) + " of '" + path + "'");
        data.pose.rotations.push_back(m);
      }
    }

    if (doc.contains("imu")) {
      const json& im = doc.at("imu");
      const auto order = im.at("sensor_order").get<std::vector<std::string>>();
      if (!std::equal(order.begin(), order.end(), sensor_order().begin(),
                      sensor_order().end()))
        throw ValidationError("unexpected imu sensor_order in '" + path + "'");
      const json& ori = im.at("orientations");
      const json& acc = im.at("accelerations");
      if (ori.size() != static_cast<size_t>(frames) || acc.size() != ori.size())
        throw ValidationError("imu frame count mismatch in '" + path + "'");
      ImuSequence imu;
      imu.fps = data.pose.fps;
      imu.orientations.reserve(static_cast<size_t>(frames) * kNumSensors);
      imu.accelerations.reserve(static_cast<size_t>(frames) * kNumSensors);
      for (int t = 0; t < frames; ++t) {
        if (ori[t].size() != kNumSensors || acc[t].size() != kNumSensors)
          throw ValidationError("imu row " + std::to_string(t) +
                                " has wrong sensor count in '" + path + "'");
        for (int s = 0; s < kNumSensors; ++s) {
          Vec9 v;
          for (int k = 0; k < 9; ++k) v[k] = ori[t][s][k].get<double>();
          Mat3 m = unflatten_rowmajor(v);
          validate_rotation_block(m, "imu frame " + std::to_string(t) +
                                         " sensor " + std::to_string(s) +
                                         " of '" + path + "'");
          imu.orientations.push_back(m);
          imu.accelerations.emplace_back(acc[t][s][0].get<double>(),
                                         acc[t][s][1].get<double>(),
                                         acc[t][s][2].get<double>());
        }
      }
      data.imu = std::move(imu);
    }
  } catch (const json::exception& e) {
    throw ParseError("malformed sequence file '" + path + "': " + e.what());
  }
  return data;
}

void write_u64(std::ostream& out, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64(std::istream& in, const std::string& path) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8))
    throw ParseError("truncated binary sequence file '" + path + "'");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64_array(std::ostream& out, const std::vector<double>& values) {
  write_u64(out, values.size());
  for (double d : values) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
  }
}

std::vector<double> read_f64_array(std::istream& in, const std::string& path) {
  const uint64_t n = read_u64(in, path);
  std::vector<double> values(n);
  for (uint64_t i = 0; i < n; ++i) {
    const uint64_t bits = read_u64(in, path);
    std::memcpy(&values[i], &bits, 8);
  }
  return values;
}

}  // namespace

SequenceData read_sequence_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sequence file '" + path + "'");
  char magic[8] = {};
  in.read(magic, 8);
  if (in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0) {
    // framed binary variant: header json, then length-prefixed f64 arrays
    const uint64_t header_len = read_u64(in, path);
    std::string header(header_len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(header_len)))
      throw ParseError("truncated binary sequence file '" + path + "'");
    json doc;
    try {
      doc = json::parse(header);
    } catch (const json::exception& e) {
      throw ParseError("malformed binary header in '" + path + "': " + e.what());
    }
    const std::vector<double> rot = read_f64_array(in, path);
    json rot_json = json::array();
    try {
      const int joints =
          static_cast<int>(doc.at("joint_order").get<std::vector<std::string>>().size());
      if (joints == 0 || rot.size() % (9ull * joints) != 0)
        throw ValidationError("rotation array shape mismatch in '" + path + "'");
      const int frames = static_cast<int>(rot.size() / (9ull * joints));
      size_t at = 0;
      for (int t = 0; t < frames; ++t) {
        json frame = json::array();
        for (int j = 0; j < joints; ++j) {
          json block = json::array();
          for (int k = 0; k < 9; ++k) block.push_back(rot[at++]);
          frame.push_back(std::move(block));
        }
        rot_json.push_back(std::move(frame));
      }
      doc["rotations"] = std::move(rot_json);
      if (doc.value("has_imu", false)) {
        const std::vector<double> ori = read_f64_array(in, path);
        const std::vector<double> acc = read_f64_array(in, path);
        if (ori.size() != static_cast<size_t>(frames) * kNumSensors * 9 ||
            acc.size() != static_cast<size_t>(frames) * kNumSensors * 3)
          throw ValidationError("imu array shape mismatch in '" + path + "'");
        json im;
        im["sensor_order"] = sensor_order();
        json ori_json = json::array(), acc_json = json::array();
        size_t po = 0, pa = 0;
        for (int t = 0; t < frames; ++t) {
          json of = json::array(), af = json::array();
          for (int s = 0; s < kNumSensors; ++s) {
            json block = json::array();
            for (int k = 0; k < 9; ++k) block.push_back(ori[po++]);
            of.push_back(std::move(block));
            af.push_back(json::array({acc[pa], acc[pa + 1], acc[pa + 2]}));
            pa += 3;
          }
          ori_json.push_back(std::move(of));
          acc_json.push_back(std::move(af));
        }
        im["orientations"] = std::move(ori_json);
        im["accelerations"] = std::move(acc_json);
        doc["imu"] = std::move(im);
      }
      doc.erase("has_imu");
    } catch (const json::exception& e) {
      throw ParseError("malformed binary sequence file '" + path + "': " +
                       e.what());
    }
    return pose_from_json(doc, path);
  }

  in.clear();
  in.seekg(0);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed sequence file '" + path + "': " + e.what());
  }
  return pose_from_json(doc, path);
}

void write_sequence_file(const std::string& path, const PoseSequence& pose,
                         const ImuSequence* imu, bool binary) {
  if (pose.frames() < 1)
    throw ValidationError("refusing to write empty pose sequence");
  if (imu && imu->frames() != pose.frames())
    throw ShapeMismatch("imu/pose frame count mismatch on write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sequence file '" + path + "'");
  if (!binary) {
    out << pose_to_json(pose, imu).dump(1) << '\n';
    return;
  }
  json header;
  header["format_version"] = 1;
  header["skeleton"] = pose.skeleton.name;
  header["fps"] = pose.fps;
  header["joint_order"] = pose.skeleton.joints;
  header["has_imu"] = imu != nullptr;
  const std::string header_str = header.dump();
  out.write(kBinaryMagic, 8);
  write_u64(out, header_str.size());
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));

  std::vector<double> rot;
  rot.reserve(pose.rotations.size() * 9);
  for (const Mat3& m : pose.rotations) {
    const Vec9 v = flatten_rowmajor(m);
    rot.insert(rot.end(), v.data(), v.data() + 9);
  }
  write_f64_array(out, rot);
  if (imu) {
    std::vector<double> ori, acc;
    ori.reserve(imu->orientations.size() * 9);
    acc.reserve(imu->accelerations.size() * 3);
    for (const Mat3& m : imu->orientations) {
      const Vec9 v = flatten_rowmajor(m);
      ori.insert(ori.end(), v.data(), v.data() + 9);
    }
    for (const Vec3& a : imu->accelerations)
      acc.insert(acc.end(), a.data(), a.data() + 3);
    write_f64_array(out, ori);
    write_f64_array(out, acc);
  }
}

MatX gt_velocity(const PoseSequence& pose,
                 const std::array<std::string, kNumSensors>& sensor_joints) {
  const int frames = pose.frames();
  if (frames < 2) throw TooShort("gt_velocity needs at least 2 frames");
  std::array<int, kNumSensors> joint;
  for (int s = 0; s < kNumSensors; ++s)
    joint[s] = pose.skeleton.index_of(sensor_joints[s]);

  MatX vel = MatX::Zero(frames, kVelDim);
  std::vector<Vec3> prev = forward_kinematics(pose.skeleton, pose.frame(0));
  for (int t = 1; t < frames; ++t) {
    const std::vector<Vec3> cur = forward_kinematics(pose.skeleton, pose.frame(t));
    const Mat3 root_t = pose.rot(t, joint[kRoot]).transpose();
    for (int s = 0; s < kNumSensors; ++s) {
      const Vec3 world = (cur[joint[s]] - prev[joint[s]]) * pose.fps;
      Vec3 v;
      if (s == kRoot) {
        v = Vec3::Zero();
        v[kUpAxis] = world[kUpAxis];  // only the vertical component is kept
      } else {
        v = root_t * world;
      }
      vel.block<1, 3>(t, s * 3) = v.transpose();
    }
    prev = std::move(cur);
  }
  return vel;
}

MatX pose_targets(const PoseSequence& pose) {
  const int frames = pose.frames();
  const std::vector<std::string>& names = predicted_joints();
  std::vector<int> joint(names.size());
  for (size_t j = 0; j < names.size(); ++j)
    joint[j] = pose.skeleton.index_of(names[j]);
  const int root = pose.skeleton.index_of("Pelvis");

  MatX targets(frames, kPoseDim);
  for (int t = 0; t < frames; ++t) {
    const Mat3 root_t = pose.rot(t, root).transpose();
    for (size_t j = 0; j < joint.size(); ++j) {
      const Vec6 r6 = mat_to_r6(root_t * pose.rot(t, joint[j]));
      targets.block<1, 6>(t, static_cast<int>(j) * 6) = r6.transpose();
    }
  }
  return targets;
}

std::vector<TrainingChunk> make_training_chunks(const PoseSequence& pose,
                                                const ImuSequence& imu,
                                                int window,
                                                bool yaw_canonical) {
  const int frames = pose.frames();
  if (imu.frames() != frames)
    throw ShapeMismatch("make_training_chunks: imu has " +
                        std::to_string(imu.frames()) + " frames, pose has " +
                        std::to_string(frames));
  if (window < 1) throw DegenerateInput("window must be >= 1");
  if (frames < window)
    throw TooShort("sequence of " + std::to_string(frames) +
                   " frames is shorter than the window " +
                   std::to_string(window));

  const MatX features = normalize_imu(imu, yaw_canonical);
  const MatX vel = gt_velocity(pose, sensor_joints_xsens23());
  const MatX targets = pose_targets(pose);

  std::vector<TrainingChunk> chunks;
  for (int start = 0; start + window <= frames; start += window) {
    TrainingChunk chunk;
    chunk.inputs = features.middleRows(start, window);
    chunk.gt_pose = targets.middleRows(start, window);
    chunk.gt_vel = vel.middleRows(start, window);
    chunk.init_vel = chunk.gt_vel.row(0).transpose();
    chunk.init_pose = chunk.gt_pose.row(0).transpose();
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

SplitManifest read_split_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  try {
    const json doc = json::parse(in);
    SplitManifest m;
    m.train = doc.value("train", std::vector<std::string>{});
    m.test = doc.value("test", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw ParseError("malformed manifest '" + path + "': " + e.what());
  }
}

void write_split_manifest(const std::string& path, const SplitManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  json doc;
  doc["train"] = manifest.train;
  doc["test"] = manifest.test;
  out << doc.dump(1) << '\n';
}

}  // namespace dynaip
