#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "spotter/trace_model.hpp"

namespace spotter {

enum class ValidationCode {
  unknown_agent,
  timestamp_out_of_range,
  negative_duration,
  lifecycle_order_violation,
  causality_violation,
  invalid_field,
};

std::string_view to_string(ValidationCode code);

struct ValidationError {
  ValidationCode code;
  std::string message;
};

using AgentSet = std::unordered_set<std::string>;

/// Per-agent lifecycle position plus the last CPU sample time; the history a
/// verdict depends on. Agents follow
///   created (started|stopped|suspended|resumed)* destroyed?
/// and an agent's own events never go back in time.
class LifecycleLedger {
 public:
  enum class State { absent, live, destroyed };

  State state(const std::string& agent_id) const;
  /// Latest timestamp seen for the agent's own events.
  std::optional<TimestampMs> last_at(const std::string& agent_id) const;
  std::optional<TimestampMs> last_cpu_at() const { return last_cpu_at_; }

  /// Advances the ledger past an event that validated.
  void apply(const TraceEvent& event);

 private:
  struct Track {
    State state = State::absent;
    std::optional<TimestampMs> last_at;
  };
  std::unordered_map<std::string, Track> tracks_;
  std::optional<TimestampMs> last_cpu_at_;
};

/// Pure verdict on one event against the session bounds, the registered
/// agents and the lifecycle history so far. nullopt means ok.
std::optional<ValidationError> validate_event(const TraceEvent& event, const SessionInfo& session,
                                              const AgentSet& known_agents,
                                              const LifecycleLedger& ledger = {});

}  // namespace spotter
