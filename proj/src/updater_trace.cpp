#include <json.hpp>

#include "tgnn/updater_sim.hpp"

namespace tgnn {

const char* to_string(TraceEvent::Kind kind) {
  switch (kind) {
    case TraceEvent::Kind::submit: return "submit";
    case TraceEvent::Kind::invalidate: return "invalidate";
    case TraceEvent::Kind::commit: return "commit";
    case TraceEvent::Kind::skip: return "skip";
    case TraceEvent::Kind::stall: return "stall";
  }
  return "?";
}

std::string format_trace_event(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["cycle"] = e.cycle;
  j["event"] = to_string(e.kind);
  j["line"] = e.line;
  j["vid"] = e.vid;
  if (e.kind == TraceEvent::Kind::submit || e.kind == TraceEvent::Kind::stall) j["cu"] = e.cu;
  return j.dump();
}

TraceEvent parse_trace_event(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TraceEvent e;
  e.cycle = j.at("cycle").get<std::uint64_t>();
  const std::string kind = j.at("event").get<std::string>();
  if (kind == "submit") e.kind = TraceEvent::Kind::submit;
  else if (kind == "invalidate") e.kind = TraceEvent::Kind::invalidate;
  else if (kind == "commit") e.kind = TraceEvent::Kind::commit;
  else if (kind == "skip") e.kind = TraceEvent::Kind::skip;
  else if (kind == "stall") e.kind = TraceEvent::Kind::stall;
  else throw SchemaError("unknown trace event '" + kind + "'");
  e.line = j.at("line").get<std::size_t>();
  e.vid = j.at("vid").get<VertexId>();
  if (j.contains("cu")) e.cu = j.at("cu").get<std::size_t>();
  return e;
}

}  // namespace tgnn
