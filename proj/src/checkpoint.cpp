#include "dynaip/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace dynaip {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'D', 'I', 'P', 'C', 'K', 'P', 'T', '\n'};

void write_u64(std::ostream& out, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64(std::istream& in, const std::string& path) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8))
    throw ParseError("truncated checkpoint '" + path + "'");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

const MatX& LoadedCheckpoint::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw ValidationError("checkpoint has no tensor '" + name + "'");
  return it->second;
}

void save_checkpoint(const std::string& path, const ParamRefs& params,
                     const AdamOptimizer* opt, const json& config) {
  struct Entry {
    std::string name;
    const MatX* value;
  };
  std::vector<Entry> entries;
  for (const ParamTensor* p : params) entries.push_back({p->name, &p->value});
  if (opt) {
    for (const auto& [name, mom] : opt->moments()) {
      entries.push_back({"adam.m." + name, &mom.m});
      entries.push_back({"adam.v." + name, &mom.v});
    }
  }

  json manifest;
  manifest["format_version"] = 1;
  manifest["config"] = config;
  manifest["adam_step"] = opt ? opt->step_count() : 0;
  json plist = json::array();
  uint64_t offset = 0;  // in doubles, into the blob
  for (const Entry& e : entries) {
    plist.push_back({{"name", e.name},
                     {"shape", {e.value->rows(), e.value->cols()}},
                     {"offset", offset}});
    offset += static_cast<uint64_t>(e.value->size());
  }
  manifest["params"] = std::move(plist);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  const std::string header = manifest.dump();
  out.write(kMagic, 8);
  write_u64(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_u64(out, offset);
  for (const Entry& e : entries) {
    // column-major coefficients, little-endian doubles
    for (Eigen::Index i = 0; i < e.value->size(); ++i) {
      uint64_t bits;
      const double d = e.value->data()[i];
      std::memcpy(&bits, &d, 8);
      write_u64(out, bits);
    }
  }
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("'" + path + "' is not a checkpoint file");
  const uint64_t header_len = read_u64(in, path);
  std::string header(header_len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(header_len)))
    throw ParseError("truncated checkpoint '" + path + "'");

  LoadedCheckpoint ckpt;
  std::vector<std::tuple<std::string, Eigen::Index, Eigen::Index, uint64_t>> entries;
  uint64_t blob_len = 0;
  try {
    const json manifest = json::parse(header);
    if (manifest.at("format_version").get<int>() != 1)
      throw ValidationError("unsupported checkpoint version in '" + path + "'");
    ckpt.config = manifest.value("config", json::object());
    ckpt.adam_step = manifest.value("adam_step", 0);
    for (const json& e : manifest.at("params")) {
      entries.emplace_back(e.at("name").get<std::string>(),
                           e.at("shape")[0].get<Eigen::Index>(),
                           e.at("shape")[1].get<Eigen::Index>(),
                           e.at("offset").get<uint64_t>());
    }
  } catch (const json::exception& e) {
    throw ParseError("malformed checkpoint manifest in '" + path + "': " +
                     e.what());
  }
  blob_len = read_u64(in, path);
  std::vector<double> blob(blob_len);
  for (uint64_t i = 0; i < blob_len; ++i) {
    const uint64_t bits = read_u64(in, path);
    std::memcpy(&blob[i], &bits, 8);
  }
  for (const auto& [name, rows, cols, offset] : entries) {
    const uint64_t count = static_cast<uint64_t>(rows) * cols;
    if (offset + count > blob_len)
      throw ValidationError("checkpoint tensor '" + name +
                            "' overruns the blob in '" + path + "'");
    MatX m(rows, cols);
    std::memcpy(m.data(), blob.data() + offset, count * sizeof(double));
    ckpt.tensors.emplace(name, std::move(m));
  }
  return ckpt;
}

void restore_params(const LoadedCheckpoint& ckpt, const ParamRefs& params) {
  for (ParamTensor* p : params) {
    const MatX& stored = ckpt.tensor(p->name);
    if (stored.rows() != p->value.rows() || stored.cols() != p->value.cols())
      throw ValidationError("checkpoint tensor '" + p->name +
                            "' has mismatched shape");
    p->value = stored;
    p->grad.setZero();
  }
}

void restore_adam(const LoadedCheckpoint& ckpt, const ParamRefs& params,
                  AdamOptimizer& opt) {
  std::map<std::string, AdamOptimizer::Moments> moments;
  for (const ParamTensor* p : params) {
    const std::string mk = "adam.m." + p->name;
    const std::string vk = "adam.v." + p->name;
    if (!ckpt.has(mk) || !ckpt.has(vk)) continue;  // fresh optimizer entry
    AdamOptimizer::Moments mom{ckpt.tensor(mk), ckpt.tensor(vk)};
    if (mom.m.rows() != p->value.rows() || mom.m.cols() != p->value.cols() ||
        mom.v.rows() != p->value.rows() || mom.v.cols() != p->value.cols())
      throw ValidationError("checkpoint moments for '" + p->name +
                            "' have mismatched shape");
    moments.emplace(p->name, std::move(mom));
  }
  opt.restore(ckpt.adam_step, std::move(moments));
}

}  // namespace dynaip
