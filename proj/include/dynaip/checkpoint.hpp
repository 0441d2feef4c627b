#pragma once

#include "dynaip/nncore.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace dynaip {

/// On-disk checkpoint: a magic tag, a JSON manifest (parameter names, shapes
/// and blob offsets, a free-form config block, and the optimizer step
/// counter), then one little-endian 64-bit float blob holding all tensors.
/// Optimizer moments are stored as tensors named "adam.m.<param>" /
/// "adam.v.<param>" so a resumed run continues exactly.
struct LoadedCheckpoint {
  nlohmann::json config;
  int adam_step = 0;
  std::map<std::string, MatX> tensors;

  const MatX& tensor(const std::string& name) const;
  bool has(const std::string& name) const { return tensors.count(name) > 0; }
};

void save_checkpoint(const std::string& path, const ParamRefs& params,
                     const AdamOptimizer* opt, const nlohmann::json& config);

LoadedCheckpoint load_checkpoint(const std::string& path);

/// Copy tensors into params by name; throws ValidationError on a missing
/// name or shape mismatch.
void restore_params(const LoadedCheckpoint& ckpt, const ParamRefs& params);

/// Restore step counter and per-parameter moments.
void restore_adam(const LoadedCheckpoint& ckpt, const ParamRefs& params,
                  AdamOptimizer& opt);

}  // namespace dynaip
