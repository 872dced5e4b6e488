#include "tgnn/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace tgnn {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_field(std::string_view field, const char* what, std::size_t line) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<double> dt_profile(const std::vector<TemporalEdge>& edges) {
  std::vector<double> out;
  std::unordered_map<VertexId, Timestamp> last;
  auto visit = [&](VertexId v, Timestamp t) {
    auto [it, inserted] = last.try_emplace(v, t);
    if (!inserted) {
      out.push_back(t - it->second);
      it->second = t;
    }
  };
  for (const TemporalEdge& e : edges) {
    visit(e.src, e.timestamp);
    if (e.dst != e.src) visit(e.dst, e.timestamp);
  }
  return out;
}

StreamStats stream_stats(const std::vector<TemporalEdge>& edges) {
  StreamStats s;
  s.row_count = edges.size();
  if (edges.empty()) return s;
  std::unordered_set<VertexId> seen;
  for (const TemporalEdge& e : edges) {
    seen.insert(e.src);
    seen.insert(e.dst);
  }
  s.vertex_count = seen.size();
  s.d_edge = edges.front().features.size();
  s.t_min = edges.front().timestamp;
  s.t_max = edges.back().timestamp;
  return s;
}

EdgeStream read_edge_csv(std::istream& in, std::optional<std::size_t> d_edge) {
  EdgeStream out;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++lineno;
  std::optional<std::size_t> arity = d_edge;
  Timestamp prev = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() < 4) throw ParseError("expected at least 4 columns", lineno);
    TemporalEdge e;
    e.edge_id = out.edges.size();
    e.src = parse_field<VertexId>(fields[0], "source id", lineno);
    e.dst = parse_field<VertexId>(fields[1], "destination id", lineno);
    e.timestamp = parse_field<double>(fields[2], "timestamp", lineno);
    const double label = parse_field<double>(fields[3], "state label", lineno);
    const std::size_t n_feat = fields.size() - 4;
    if (!arity) arity = n_feat;
    if (n_feat != *arity) {
      throw ParseError("expected " + std::to_string(*arity) + " features, found " +
                           std::to_string(n_feat),
                       lineno);
    }
    if (!std::isfinite(e.timestamp)) throw ParseError("non-finite timestamp", lineno);
    if (!out.edges.empty() && e.timestamp < prev) {
      throw ParseError("timestamp " + format_double(e.timestamp) + " is lower than the previous " +
                           format_double(prev),
                       lineno);
    }
    e.features.reserve(n_feat);
    for (std::size_t j = 0; j < n_feat; ++j) {
      e.features.push_back(parse_field<double>(fields[4 + j], "feature", lineno));
    }
    prev = e.timestamp;
    out.labels.push_back(static_cast<int>(label));
    out.edges.push_back(std::move(e));
  }
  out.stats = stream_stats(out.edges);
  if (arity) out.stats.d_edge = *arity;
  out.dt_samples = dt_profile(out.edges);
  return out;
}

EdgeStream read_edge_csv(const std::filesystem::path& path, std::optional<std::size_t> d_edge) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  return read_edge_csv(f, d_edge);
}

void write_edge_csv(std::ostream& out, const std::vector<TemporalEdge>& edges,
                    const std::vector<int>& labels) {
  out << "src,dst,timestamp,state_label";
  const std::size_t d = edges.empty() ? 0 : edges.front().features.size();
  for (std::size_t j = 1; j <= d; ++j) out << ",f_" << j;
  out << '\n';
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const TemporalEdge& e = edges[i];
    out << e.src << ',' << e.dst << ',' << format_double(e.timestamp) << ','
        << (i < labels.size() ? labels[i] : 0);
    for (double f : e.features) out << ',' << format_double(f);
    out << '\n';
  }
}

std::vector<TemporalEdge> synthetic_stream(const SyntheticSpec& spec) {
  if (spec.vertices < 2) throw ConfigError("synthetic stream needs at least 2 vertices");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> gap(1.0 / spec.mean_gap);
  std::normal_distribution<double> feature(0.0, 1.0);

  std::vector<TemporalEdge> edges;
  edges.reserve(spec.edges);
  double t = 0.0;
  for (std::size_t i = 0; i < spec.edges; ++i) {
    // Bursty arrivals: mostly short gaps with an occasional long pause.
    const double scale = unit(rng) < 0.9 ? 0.2 : 8.2;
    t += gap(rng) * scale;
    const double u = unit(rng);
    const auto src = static_cast<VertexId>(u * u * static_cast<double>(spec.vertices));
    auto dst = static_cast<VertexId>(unit(rng) * static_cast<double>(spec.vertices - 1));
    if (dst >= src) ++dst;
    TemporalEdge e{i, src, dst, t, Vec(spec.d_edge)};
    for (double& f : e.features) f = feature(rng);
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace tgnn
