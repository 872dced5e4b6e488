#include "tgnn/distill.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tgnn {

namespace {

void check_args(const std::vector<DistillSample>& samples, const SimplifiedAttnParams& params,
                double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("distillation temperature must be positive");
  if (samples.empty()) throw ConfigError("distillation needs at least one sample");
  const std::size_t n = params.n();
  for (const DistillSample& s : samples) {
    if (s.dt_vec.size() != n || s.teacher_logits.size() != n || s.mask.size() != n) {
      throw ConfigError("distillation sample does not have " + std::to_string(n) + " slots");
    }
  }
}

Vec tempered(const Vec& logits, double temperature) {
  Vec out(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = is_masked_logit(logits[j]) ? kMaskedLogit : logits[j] / temperature;
  }
  return out;
}

struct SampleTerms {
  Vec student;  // softmax(a'/T)
  Vec teacher;  // softmax(a/T), masked like the student
  Vec dt;       // dt with masked slots zeroed
  bool empty = false;
};

SampleTerms sample_terms(const DistillSample& s, const SimplifiedAttnParams& params,
                         double temperature) {
  SampleTerms t;
  if (std::find(s.mask.begin(), s.mask.end(), false) == s.mask.end()) {
    t.empty = true;
    return t;
  }
  const Vec student_logits = simplified_logits(s.dt_vec, s.mask, params);
  Vec teacher_logits = s.teacher_logits;
  for (std::size_t j = 0; j < teacher_logits.size(); ++j) {
    if (s.mask[j]) teacher_logits[j] = kMaskedLogit;
  }
  t.student = masked_softmax(tempered(student_logits, temperature));
  t.teacher = masked_softmax(tempered(teacher_logits, temperature));
  t.dt.resize(s.dt_vec.size());
  for (std::size_t j = 0; j < t.dt.size(); ++j) t.dt[j] = s.mask[j] ? 0.0 : s.dt_vec[j];
  return t;
}

}  // namespace

double kd_loss(const std::vector<DistillSample>& samples, const SimplifiedAttnParams& params,
               double temperature, DistillLoss kind) {
  check_args(samples, params, temperature);
  double loss = 0.0;
  for (const DistillSample& s : samples) {
    const SampleTerms t = sample_terms(s, params, temperature);
    if (t.empty) continue;
    double term = 0.0;
    for (std::size_t j = 0; j < t.student.size(); ++j) {
      if (s.mask[j]) continue;
      term += kind == DistillLoss::dot ? t.student[j] * t.teacher[j]
                                       : t.teacher[j] * std::log(t.student[j]);
    }
    loss -= term;
  }
  return loss;
}

DistillGradient kd_loss_grad(const std::vector<DistillSample>& samples,
                             const SimplifiedAttnParams& params, double temperature,
                             DistillLoss kind) {
  check_args(samples, params, temperature);
  const std::size_t n = params.n();
  DistillGradient g{Vec(n, 0.0), Matrix(n, n)};
  for (const DistillSample& s : samples) {
    const SampleTerms t = sample_terms(s, params, temperature);
    if (t.empty) continue;
    double pq = 0.0;
    for (std::size_t j = 0; j < n; ++j) pq += t.student[j] * t.teacher[j];
    for (std::size_t j = 0; j < n; ++j) {
      if (s.mask[j]) continue;
      // d loss / d student_logit_j
      const double dz = kind == DistillLoss::dot ? -t.student[j] * (t.teacher[j] - pq)
                                                 : t.student[j] - t.teacher[j];
      const double dl = dz / temperature;
      g.d_a[j] += dl;
      for (std::size_t i = 0; i < n; ++i) g.d_W_t(j, i) += dl * t.dt[i];
    }
  }
  return g;
}

FitResult fit_attention_params(const std::vector<DistillSample>& samples,
                               const SimplifiedAttnParams& init, double learning_rate,
                               std::size_t steps, double temperature, DistillLoss kind) {
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be a finite non-negative number");
  }
  FitResult result{init, {}, false};
  double loss = kd_loss(samples, result.params, temperature, kind);
  result.loss_trace.push_back(loss);
  for (std::size_t step = 0; step < steps; ++step) {
    const DistillGradient g = kd_loss_grad(samples, result.params, temperature, kind);
    for (std::size_t j = 0; j < g.d_a.size(); ++j) result.params.a[j] -= learning_rate * g.d_a[j];
    auto& w = result.params.W_t.data();
    const auto& dw = g.d_W_t.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * dw[i];
    loss = kd_loss(samples, result.params, temperature, kind);
    result.loss_trace.push_back(loss);
    if (!std::isfinite(loss)) {
      result.diverged = true;
      break;
    }
  }
  return result;
}

}  // namespace tgnn
