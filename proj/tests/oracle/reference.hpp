#pragma once

// Scalar-loop reference implementations used as test oracles. They work on
// plain nested vectors and full concatenated inputs, share no kernel code with
// the library, and aim for clarity over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace ref {

using V = std::vector<double>;
using M = std::vector<V>;  // row-major, M[r][c]

inline V matvec(const M& w, const V& x) {
  V out(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    for (std::size_t c = 0; c < x.size(); ++c) out[r] += w[r][c] * x[c];
  }
  return out;
}

inline V cat(std::initializer_list<V> parts) {
  V out;
  for (const V& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline V encode(const V& omega, const V& phi, double dt) {
  V out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = std::cos(omega[i] * dt + phi[i]);
  return out;
}

struct Gru {
  M W_ir, W_iz, W_in, W_hr, W_hz, W_hn;
  V b_ir, b_iz, b_in, b_hr, b_hz, b_hn;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline V gru(const V& raw, double msg_ts, double now, const V& s, const Gru& p, const V& omega,
             const V& phi) {
  const V m = cat({raw, encode(omega, phi, now - msg_ts)});
  const V ir = matvec(p.W_ir, m), iz = matvec(p.W_iz, m), in = matvec(p.W_in, m);
  const V hr = matvec(p.W_hr, s), hz = matvec(p.W_hz, s), hn = matvec(p.W_hn, s);
  V out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = sigmoid(ir[i] + p.b_ir[i] + hr[i] + p.b_hr[i]);
    const double z = sigmoid(iz[i] + p.b_iz[i] + hz[i] + p.b_hz[i]);
    const double n = std::tanh(in[i] + p.b_in[i] + r * (hn[i] + p.b_hn[i]));
    out[i] = (1.0 - z) * n + z * s[i];
  }
  return out;
}

struct Node {
  V memory, features, edge;
  double timestamp = 0.0;
  bool masked = true;
};

inline V merge(const V& s, const V& f, const M& W_s, const V& b_s) {
  const V p = matvec(W_s, f);
  V out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] + p[i] + b_s[i];
  return out;
}

inline V affine(const M& w, const V& x, const V& b) {
  V out = matvec(w, x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

struct Vanilla {
  M W_s;
  V b_s;
  M W_q, W_k, W_v;
  V b_q, b_k, b_v;
  V omega, phi;
};

inline V vanilla(const V& s, const V& f, double now, const std::vector<Node>& nbrs,
                 const Vanilla& p, V* logits = nullptr) {
  const V self = merge(s, f, p.W_s, p.b_s);
  const std::size_t d_edge = p.W_k[0].size() - s.size() - p.omega.size();
  std::size_t valid = 0;
  for (const Node& nb : nbrs) valid += nb.masked ? 0 : 1;
  if (valid == 0) return affine(p.W_v, cat({self, V(d_edge, 0.0), encode(p.omega, p.phi, 0.0)}), p.b_v);

  const V q = affine(p.W_q, cat({self, encode(p.omega, p.phi, 0.0)}), p.b_q);
  std::vector<double> score;
  std::vector<V> values;
  for (const Node& nb : nbrs) {
    if (nb.masked) continue;
    const V x = cat({merge(nb.memory, nb.features, p.W_s, p.b_s), nb.edge,
                     encode(p.omega, p.phi, now - nb.timestamp)});
    const V k = affine(p.W_k, x, p.b_k);
    double qk = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) qk += q[i] * k[i];
    score.push_back(qk / std::sqrt(static_cast<double>(valid)));
    values.push_back(affine(p.W_v, x, p.b_v));
  }
  if (logits != nullptr) {
    logits->clear();
    std::size_t j = 0;
    for (const Node& nb : nbrs) logits->push_back(nb.masked ? -INFINITY : score[j++]);
  }
  const double mx = *std::max_element(score.begin(), score.end());
  double z = 0.0;
  for (double x : score) z += std::exp(x - mx);
  V out(q.size(), 0.0);
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double w = std::exp(score[j] - mx) / z;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * values[j][i];
  }
  return out;
}

struct Simplified {
  M W_s;
  V b_s;
  V a;
  M W_t;
  M W_v, W_o;
  V b_v, b_o;
  V omega, phi;
};

// Logits of the unmasked slots, masked ones reported as -inf.
inline V simplified_logits(const V& dt, const std::vector<bool>& mask, const V& a, const M& W_t) {
  V out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (mask[j]) {
      out[j] = -INFINITY;
      continue;
    }
    double acc = a[j];
    for (std::size_t i = 0; i < dt.size(); ++i) {
      if (!mask[i]) acc += W_t[j][i] * dt[i];
    }
    out[j] = acc;
  }
  return out;
}

// Top-`budget` unmasked slots by repeated arg-max (first index wins ties).
inline std::vector<std::size_t> topk(const V& logits, std::size_t budget) {
  std::vector<bool> taken(logits.size(), false);
  std::vector<std::size_t> out;
  for (std::size_t round = 0; round < budget; ++round) {
    std::size_t best = logits.size();
    for (std::size_t j = 0; j < logits.size(); ++j) {
      if (taken[j] || std::isinf(logits[j])) continue;
      if (best == logits.size() || logits[j] > logits[best]) best = j;
    }
    if (best == logits.size()) break;
    taken[best] = true;
    out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline V simplified(const V& s, const V& f, double now, const std::vector<Node>& nbrs,
                    std::size_t budget, const Simplified& p,
                    std::vector<std::size_t>* kept_out = nullptr) {
  const V self = merge(s, f, p.W_s, p.b_s);
  const std::size_t d_emb = p.W_v.size();
  const std::size_t d_edge = p.W_v[0].size() - s.size() - p.omega.size();
  V dt(nbrs.size(), 0.0);
  std::vector<bool> mask(nbrs.size());
  for (std::size_t j = 0; j < nbrs.size(); ++j) {
    mask[j] = nbrs[j].masked;
    if (!mask[j]) dt[j] = now - nbrs[j].timestamp;
  }
  const V logits = simplified_logits(dt, mask, p.a, p.W_t);
  const std::vector<std::size_t> kept = topk(logits, budget);
  if (kept_out != nullptr) *kept_out = kept;

  V agg(d_emb, 0.0);
  if (kept.empty()) {
    agg = affine(p.W_v, cat({self, V(d_edge, 0.0), encode(p.omega, p.phi, 0.0)}), p.b_v);
  } else {
    double mx = -INFINITY;
    for (std::size_t j : kept) mx = std::max(mx, logits[j]);
    double z = 0.0;
    for (std::size_t j : kept) z += std::exp(logits[j] - mx);
    for (std::size_t j : kept) {
      const Node& nb = nbrs[j];
      const V x = cat({merge(nb.memory, nb.features, p.W_s, p.b_s), nb.edge,
                       encode(p.omega, p.phi, now - nb.timestamp)});
      const V v = affine(p.W_v, x, p.b_v);
      const double w = std::exp(logits[j] - mx) / z;
      for (std::size_t i = 0; i < d_emb; ++i) agg[i] += w * v[i];
    }
  }
  return affine(p.W_o, cat({agg, self}), p.b_o);
}

inline V softmax_unmasked(const V& logits, const std::vector<bool>& mask, double temperature) {
  double mx = -INFINITY;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (!mask[j]) mx = std::max(mx, logits[j] / temperature);
  }
  V out(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (!mask[j]) z += (out[j] = std::exp(logits[j] / temperature - mx));
  }
  for (double& x : out) x /= z;
  return out;
}

struct KdSample {
  V dt, teacher;
  std::vector<bool> mask;
};

// -sum over samples of softmax(teacher/T) . softmax(student/T); all-masked
// samples contribute nothing. With `log_form` the student side is log softmax.
inline double kd_loss(const std::vector<KdSample>& samples, const V& a, const M& W_t, double T,
                      bool log_form = false) {
  double loss = 0.0;
  for (const KdSample& s : samples) {
    if (std::all_of(s.mask.begin(), s.mask.end(), [](bool m) { return m; })) continue;
    const V student = simplified_logits(s.dt, s.mask, a, W_t);
    const V p = softmax_unmasked(s.teacher, s.mask, T);
    const V q = softmax_unmasked(student, s.mask, T);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!s.mask[j]) loss -= log_form ? p[j] * std::log(q[j]) : p[j] * q[j];
    }
  }
  return loss;
}

// Ring oracle: full interaction log per vertex, sliced on demand.
class NeighborLog {
 public:
  struct Rec {
    std::uint64_t nbr, edge;
    double t;
  };
  void add(std::uint64_t v, Rec r) { log_[v].push_back(r); }
  std::vector<Rec> last(std::uint64_t v, std::size_t n) const {
    auto it = log_.find(v);
    if (it == log_.end()) return {};
    const auto& h = it->second;
    const std::size_t k = std::min(n, h.size());
    return {h.end() - static_cast<std::ptrdiff_t>(k), h.end()};
  }

 private:
  std::map<std::uint64_t, std::vector<Rec>> log_;
};

}  // namespace ref
