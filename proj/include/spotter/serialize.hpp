#pragma once

// Canonical JSON forms shared by the snapshot file and the HTTP/CLI
// exports. Objects keep a fixed field order and carry integers only, so the
// same value always produces the same bytes.

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "spotter/trace_model.hpp"

namespace spotter {

using Json = nlohmann::ordered_json;

/// Thrown when a JSON value does not have the expected shape.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json json_of(const SessionInfo& session);
Json json_of(const AgentDescriptor& agent);
Json json_of(const Endpoint& endpoint);
Json json_of(const MessageEvent& message);

/// Tagged record: {"k": <kind>, "seq": n, ...fields}.
Json json_of(const EventRecord& record);

SessionInfo session_from_json(const Json& j);
AgentDescriptor agent_from_json(const Json& j);
EventRecord record_from_json(const Json& j);

/// Compact single-line dump used everywhere bytes matter.
std::string canonical_dump(const Json& j);

}  // namespace spotter
