#include "tgnn/memory_update.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace tgnn {

namespace {

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ConfigError(std::string("GRU ") + name + " is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
}

void check_len(const Vec& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw ConfigError(std::string("GRU ") + name + " has length " + std::to_string(v.size()) +
                      ", expected " + std::to_string(n));
  }
}

template <class Real>
Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

template <class Real>
Real dot_as(std::span<const double> w, std::span<const Real> x) {
  Real acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += static_cast<Real>(w[i]) * x[i];
  return acc;
}

template <class Real>
class GruKernel {
 public:
  GruKernel(std::span<const double> raw, double dt, std::span<const double> s,
            const GruParams& p, const TimePath& time, OpCounter* ops)
      : raw_(raw.begin(), raw.end()), s_(s.begin(), s.end()), dt_(dt), p_(p), time_(time),
        ops_(ops) {}

  Vec run() {
    const std::size_t d = p_.d_mem();
    const auto ir = input_projection(p_.W_ir, p_.b_ir, kConsumerGruR);
    const auto iz = input_projection(p_.W_iz, p_.b_iz, kConsumerGruZ);
    const auto in = input_projection(p_.W_in, p_.b_in, kConsumerGruN);
    const auto hr = hidden_projection(p_.W_hr, p_.b_hr);
    const auto hz = hidden_projection(p_.W_hz, p_.b_hz);
    const auto hn = hidden_projection(p_.W_hn, p_.b_hn);

    Vec out(d);
    for (std::size_t i = 0; i < d; ++i) {
      const Real r = sigmoid(ir[i] + hr[i]);
      const Real z = sigmoid(iz[i] + hz[i]);
      const Real n = std::tanh(in[i] + r * hn[i]);
      out[i] = static_cast<double>((Real(1) - z) * n + z * s_[i]);
    }
    count_macs(ops_, 3 * d);
    return out;
  }

 private:
  std::vector<Real> input_projection(const Matrix& w, const Vec& b, const std::string& consumer) {
    const std::size_t d = w.rows();
    const std::size_t raw_len = raw_.size();
    std::vector<Real> raw_part(d);
    for (std::size_t r = 0; r < d; ++r) {
      raw_part[r] = dot_as<Real>(w.row(r).subspan(0, raw_len), std::span<const Real>(raw_));
    }
    count_macs(ops_, static_cast<std::uint64_t>(d) * raw_len);

    std::vector<Real> time_part(d);
    if constexpr (std::is_same_v<Real, double>) {
      time_.contribution(w, raw_len, dt_, consumer, time_part, ops_);
    } else {
      if (time_.uses_lut()) {
        const TimeLut& lut = *time_.table();
        const Vec& product = lut.fused(consumer).at(lut.lookup(dt_));
        for (std::size_t r = 0; r < d; ++r) time_part[r] = static_cast<Real>(product[r]);
      } else {
        const Vec phi_d = time_.encode(dt_);
        const std::vector<Real> phi(phi_d.begin(), phi_d.end());
        for (std::size_t r = 0; r < d; ++r) {
          time_part[r] = dot_as<Real>(w.row(r).subspan(raw_len, phi.size()),
                                      std::span<const Real>(phi));
        }
        count_macs(ops_, static_cast<std::uint64_t>(d) * phi.size());
      }
    }

    std::vector<Real> out(d);
    for (std::size_t r = 0; r < d; ++r) out[r] = (raw_part[r] + time_part[r]) + static_cast<Real>(b[r]);
    return out;
  }

  std::vector<Real> hidden_projection(const Matrix& w, const Vec& b) {
    const std::size_t d = w.rows();
    std::vector<Real> out(d);
    for (std::size_t r = 0; r < d; ++r) {
      out[r] = dot_as<Real>(w.row(r), std::span<const Real>(s_)) + static_cast<Real>(b[r]);
    }
    count_macs(ops_, static_cast<std::uint64_t>(d) * s_.size());
    return out;
  }

  std::vector<Real> raw_;
  std::vector<Real> s_;
  double dt_;
  const GruParams& p_;
  const TimePath& time_;
  OpCounter* ops_;
};

}  // namespace

void GruParams::validate(std::size_t d_mem, std::size_t d_edge, std::size_t d_time) const {
  const std::size_t full = 2 * d_mem + d_edge + d_time;
  check_shape(W_ir, d_mem, full, "W_ir");
  check_shape(W_iz, d_mem, full, "W_iz");
  check_shape(W_in, d_mem, full, "W_in");
  check_shape(W_hr, d_mem, d_mem, "W_hr");
  check_shape(W_hz, d_mem, d_mem, "W_hz");
  check_shape(W_hn, d_mem, d_mem, "W_hn");
  check_len(b_ir, d_mem, "b_ir");
  check_len(b_iz, d_mem, "b_iz");
  check_len(b_in, d_mem, "b_in");
  check_len(b_hr, d_mem, "b_hr");
  check_len(b_hz, d_mem, "b_hz");
  check_len(b_hn, d_mem, "b_hn");
}

std::pair<RawMessage, RawMessage> generate_messages(const TemporalEdge& edge,
                                                    std::span<const double> s_src,
                                                    std::span<const double> s_dst) {
  if (s_src.size() != s_dst.size()) throw ConfigError("message memories differ in length");
  RawMessage to_src{concat({s_src, s_dst, edge.features}), edge.timestamp};
  RawMessage to_dst{concat({s_dst, s_src, edge.features}), edge.timestamp};
  return {std::move(to_src), std::move(to_dst)};
}

const PendingMessage& aggregate_most_recent(std::span<const PendingMessage> messages) {
  if (messages.empty()) throw PreconditionError("aggregate_most_recent on an empty list");
  const PendingMessage* best = &messages.front();
  for (const PendingMessage& m : messages.subspan(1)) {
    if (m.msg_timestamp > best->msg_timestamp ||
        (m.msg_timestamp == best->msg_timestamp && m.stream_order > best->stream_order)) {
      best = &m;
    }
  }
  return *best;
}

Vec gru_update(std::span<const double> raw_message, Timestamp msg_timestamp, Timestamp now,
               std::span<const double> s, const GruParams& params, const TimePath& time,
               OpCounter* ops, Precision precision) {
  if (now < msg_timestamp) {
    throw PreconditionError("GRU update with negative time difference (now " +
                            std::to_string(now) + " < message " + std::to_string(msg_timestamp) +
                            ")");
  }
  const std::size_t d = params.d_mem();
  if (s.size() != d) throw ConfigError("GRU hidden state length does not match d_mem");
  if (raw_message.size() + time.dim() != params.W_ir.cols()) {
    throw ConfigError("GRU message length does not match the input weight columns");
  }
  const double dt = now - msg_timestamp;
  if (precision == Precision::f32) {
    return GruKernel<float>(raw_message, dt, s, params, time, ops).run();
  }
  return GruKernel<double>(raw_message, dt, s, params, time, ops).run();
}

std::uint64_t gru_macs(std::size_t d_mem, std::size_t d_edge, std::size_t d_time, bool lut) {
  const std::uint64_t d = d_mem;
  const std::uint64_t raw = 2 * d_mem + d_edge;
  std::uint64_t macs = 3 * d * raw + 3 * d * d + 3 * d;
  if (!lut) macs += 3 * d * d_time;
  return macs;
}

}  // namespace tgnn
