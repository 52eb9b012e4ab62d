#include "spotter/serialize.hpp"

#include <variant>

namespace spotter {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw DecodeError("record is not an object");
  auto it = j.find(key);
  if (it == j.end()) throw DecodeError(std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t get_int(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer())
    throw DecodeError(std::string("field '") + key + "' is not an integer");
  return v.get<std::int64_t>();
}

std::string get_str(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw DecodeError(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

bool get_bool(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) throw DecodeError(std::string("field '") + key + "' is not a boolean");
  return v.get<bool>();
}

std::optional<std::string> opt_str(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return get_str(j, key);
}

template <class Enum>
Enum get_enum(const Json& j, const char* key, std::optional<Enum> (*parse)(std::string_view)) {
  auto s = get_str(j, key);
  auto v = parse(s);
  if (!v) throw DecodeError(std::string("unknown value '") + s + "' for '" + key + "'");
  return *v;
}

Endpoint endpoint_from_json(const Json& j) {
  return Endpoint{get_str(j, "platform"), get_str(j, "agent"), get_bool(j, "external")};
}

Json tagged(const char* kind, Sequence seq) {
  Json j = Json::object();
  j["k"] = kind;
  j["seq"] = seq;
  return j;
}

}  // namespace

Json json_of(const SessionInfo& s) {
  Json j = Json::object();
  j["format_version"] = s.format_version;
  j["session_id"] = s.session_id;
  j["platform"] = s.platform_name;
  j["started_at_ms"] = s.started_at_wallclock_ms;
  j["duration_ms"] = s.duration_ms;
  j["slice_ms"] = s.slice_ms;
  j["clock_resolution_ms"] = s.clock_resolution_ms;
  return j;
}

Json json_of(const AgentDescriptor& a) {
  Json j = Json::object();
  j["id"] = a.agent_id;
  j["name"] = a.name;
  j["role"] = a.role;
  j["rationality"] = to_string(a.rationality);
  return j;
}

Json json_of(const Endpoint& e) {
  Json j = Json::object();
  j["platform"] = e.platform_id;
  j["agent"] = e.agent_id;
  j["external"] = e.is_external;
  return j;
}

Json json_of(const MessageEvent& m) {
  Json j = Json::object();
  j["id"] = m.message_id;
  j["sent_at"] = m.sent_at;
  if (m.received_at) j["received_at"] = *m.received_at;
  j["scope"] = to_string(m.scope);
  j["from"] = json_of(m.sender);
  j["to"] = json_of(m.receiver);
  j["performative"] = m.headers.performative;
  if (m.headers.conversation_id) j["conversation_id"] = *m.headers.conversation_id;
  j["content"] = m.headers.content;
  Json other = Json::array();
  for (const auto& [k, v] : m.headers.other) other.push_back(Json::array({k, v}));
  j["headers"] = std::move(other);
  return j;
}

Json json_of(const EventRecord& r) {
  return std::visit(
      [&](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LifecycleEvent>) {
          Json j = tagged("lifecycle", r.seq);
          j["agent"] = e.agent_id;
          j["kind"] = to_string(e.kind);
          j["at"] = e.at;
          return j;
        } else if constexpr (std::is_same_v<T, IterationEvent>) {
          Json j = tagged("iteration", r.seq);
          j["agent"] = e.agent_id;
          j["start"] = e.start;
          j["duration"] = e.duration_ms;
          if (e.breakdown) {
            j["breakdown"] = Json::array(
                {e.breakdown->perception_ms, e.breakdown->reasoning_ms, e.breakdown->action_ms});
          }
          return j;
        } else if constexpr (std::is_same_v<T, SimpleEvent>) {
          Json j = tagged("simple", r.seq);
          j["agent"] = e.agent_id;
          j["at"] = e.at;
          j["kind"] = e.kind;
          if (e.payload) j["payload"] = *e.payload;
          return j;
        } else if constexpr (std::is_same_v<T, MessageEvent>) {
          Json j = tagged("message", r.seq);
          j.update(json_of(e));
          return j;
        } else {
          Json j = tagged("cpu", r.seq);
          j["at"] = e.at;
          j["load_centipct"] = e.load_centipct;
          return j;
        }
      },
      r.event);
}

SessionInfo session_from_json(const Json& j) {
  SessionInfo s;
  s.format_version = static_cast<int>(get_int(j, "format_version"));
  s.session_id = get_str(j, "session_id");
  s.platform_name = get_str(j, "platform");
  s.started_at_wallclock_ms = get_int(j, "started_at_ms");
  s.duration_ms = get_int(j, "duration_ms");
  s.slice_ms = get_int(j, "slice_ms");
  s.clock_resolution_ms = get_int(j, "clock_resolution_ms");
  return s;
}

AgentDescriptor agent_from_json(const Json& j) {
  return AgentDescriptor{get_str(j, "id"), get_str(j, "name"), get_str(j, "role"),
                         get_enum(j, "rationality", &parse_rationality)};
}

EventRecord record_from_json(const Json& j) {
  const auto kind = get_str(j, "k");
  const auto seq_raw = get_int(j, "seq");
  if (seq_raw < 0) throw DecodeError("negative sequence number");
  EventRecord r;
  r.seq = static_cast<Sequence>(seq_raw);
  if (kind == "lifecycle") {
    r.event = LifecycleEvent{get_str(j, "agent"), get_enum(j, "kind", &parse_lifecycle_kind),
                             get_int(j, "at")};
  } else if (kind == "iteration") {
    IterationEvent e{get_str(j, "agent"), get_int(j, "start"), get_int(j, "duration"), {}};
    if (j.contains("breakdown")) {
      const Json& b = j["breakdown"];
      if (!b.is_array() || b.size() != 3 || !b[0].is_number_integer() ||
          !b[1].is_number_integer() || !b[2].is_number_integer())
        throw DecodeError("breakdown must be three integers");
      e.breakdown = IterationBreakdown{b[0].get<std::int64_t>(), b[1].get<std::int64_t>(),
                                       b[2].get<std::int64_t>()};
    }
    r.event = std::move(e);
  } else if (kind == "simple") {
    r.event = SimpleEvent{get_str(j, "agent"), get_int(j, "at"), get_str(j, "kind"),
                          opt_str(j, "payload")};
  } else if (kind == "message") {
    MessageEvent m;
    m.message_id = get_str(j, "id");
    m.sent_at = get_int(j, "sent_at");
    if (j.contains("received_at")) m.received_at = get_int(j, "received_at");
    m.scope = get_enum(j, "scope", &parse_message_scope);
    m.sender = endpoint_from_json(field(j, "from"));
    m.receiver = endpoint_from_json(field(j, "to"));
    m.headers.performative = get_str(j, "performative");
    m.headers.conversation_id = opt_str(j, "conversation_id");
    m.headers.content = get_str(j, "content");
    const Json& other = field(j, "headers");
    if (!other.is_array()) throw DecodeError("headers must be an array");
    for (const auto& kv : other) {
      if (!kv.is_array() || kv.size() != 2 || !kv[0].is_string() || !kv[1].is_string())
        throw DecodeError("header entries must be [key, value] string pairs");
      m.headers.other.emplace_back(kv[0].get<std::string>(), kv[1].get<std::string>());
    }
    r.event = std::move(m);
  } else if (kind == "cpu") {
    r.event = CpuSample{get_int(j, "at"), static_cast<std::int32_t>(get_int(j, "load_centipct"))};
  } else {
    throw DecodeError("unknown record kind '" + kind + "'");
  }
  return r;
}

std::string canonical_dump(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

}  // namespace spotter
