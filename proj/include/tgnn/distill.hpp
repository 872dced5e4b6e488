#pragma once

#include <cstddef>
#include <vector>

#include "tgnn/attention.hpp"

namespace tgnn {

// One teacher/student pair of attention logit vectors over the same n slots.
struct DistillSample {
  Vec dt_vec;
  Vec teacher_logits;
  std::vector<bool> mask;
};

enum class DistillLoss {
  // -sum_v softmax(a'/T) . softmax(a/T)
  dot,
  // -sum_v softmax(a/T) . log softmax(a'/T)
  cross_entropy,
};

struct DistillGradient {
  Vec d_a;
  Matrix d_W_t;
};

// Throws ConfigError for temperature <= 0 or an empty sample list.
double kd_loss(const std::vector<DistillSample>& samples, const SimplifiedAttnParams& params,
               double temperature, DistillLoss kind = DistillLoss::dot);

// Analytic gradient with the teacher distribution held constant.
DistillGradient kd_loss_grad(const std::vector<DistillSample>& samples,
                             const SimplifiedAttnParams& params, double temperature,
                             DistillLoss kind = DistillLoss::dot);

struct FitResult {
  SimplifiedAttnParams params;
  // loss_trace[i] is the loss after i steps; size steps + 1 unless diverged.
  std::vector<double> loss_trace;
  bool diverged = false;
};

// Plain gradient descent on (a, W_t). Stops early and sets `diverged` when the
// loss becomes non-finite.
FitResult fit_attention_params(const std::vector<DistillSample>& samples,
                               const SimplifiedAttnParams& init, double learning_rate,
                               std::size_t steps, double temperature = 1.0,
                               DistillLoss kind = DistillLoss::dot);

}  // namespace tgnn
