#pragma once

#include <optional>

#include "tgnn/attention.hpp"
#include "tgnn/config.hpp"
#include "tgnn/memory_update.hpp"
#include "tgnn/time_encoding.hpp"

namespace tgnn {

// Every learnable tensor of the model. Attention blocks are optional so one
// weights file can carry the teacher, the student or both.
struct ModelParams {
  CosineEncoder encoder;
  GruParams gru;
  FeatureMerge merge;
  std::optional<VanillaAttnParams> vanilla;
  std::optional<SimplifiedAttnParams> simplified;
  std::optional<ValueTransform> value;
  std::optional<TimeLut> lut;

  // Shape checks against the config, plus SchemaError when the variant needs
  // a block that is absent.
  void validate(const EngineConfig& config) const;

  bool operator==(const ModelParams&) const = default;
};

AttnDims attn_dims(const EngineConfig& config);

// Pre-multiplies the LUT entries with the time blocks of W_ir, W_iz, W_in
// and (when present) the student W_v.
TimeLut fuse_all(const TimeLut& lut, const ModelParams& params, const EngineConfig& config);

// Small random parameters (uniform in +-scale / sqrt(fan_in)) for every
// block, deterministic in the seed. Used for desk-scale runs and tests.
ModelParams random_params(const EngineConfig& config, std::uint64_t seed, double scale = 1.0);

}  // namespace tgnn
