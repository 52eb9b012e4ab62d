#include "spotter/validation.hpp"

#include <variant>

namespace spotter {

namespace {

std::optional<ValidationError> fail(ValidationCode code, std::string message) {
  return ValidationError{code, std::move(message)};
}

bool in_session(TimestampMs t, const SessionInfo& session) {
  return t >= 0 && t <= session.duration_ms;
}

std::optional<ValidationError> check_internal_agent(const std::string& agent_id,
                                                    const AgentSet& known) {
  if (agent_id.empty()) return fail(ValidationCode::invalid_field, "empty agent id");
  if (!known.contains(agent_id))
    return fail(ValidationCode::unknown_agent, "agent '" + agent_id + "' is not registered");
  return std::nullopt;
}

std::optional<ValidationError> check_agent_time(const std::string& agent_id, TimestampMs t,
                                                const LifecycleLedger& ledger) {
  if (ledger.state(agent_id) == LifecycleLedger::State::destroyed)
    return fail(ValidationCode::lifecycle_order_violation,
                "'" + agent_id + "' has already been destroyed");
  if (auto last = ledger.last_at(agent_id); last && t < *last)
    return fail(ValidationCode::timestamp_out_of_range,
                "events of '" + agent_id + "' go back in time");
  return std::nullopt;
}

std::optional<ValidationError> check(const LifecycleEvent& e, const SessionInfo& session,
                                     const AgentSet& known, const LifecycleLedger& ledger) {
  if (auto err = check_internal_agent(e.agent_id, known)) return err;
  if (!in_session(e.at, session))
    return fail(ValidationCode::timestamp_out_of_range, "lifecycle timestamp outside session");
  if (auto err = check_agent_time(e.agent_id, e.at, ledger)) return err;
  const auto state = ledger.state(e.agent_id);
  if (e.kind == LifecycleKind::created && state != LifecycleLedger::State::absent)
    return fail(ValidationCode::lifecycle_order_violation,
                "'" + e.agent_id + "' created twice");
  if (e.kind != LifecycleKind::created && state == LifecycleLedger::State::absent)
    return fail(ValidationCode::lifecycle_order_violation,
                std::string(to_string(e.kind)) + " before created for '" + e.agent_id + "'");
  return std::nullopt;
}

std::optional<ValidationError> check(const IterationEvent& e, const SessionInfo& session,
                                     const AgentSet& known, const LifecycleLedger& ledger) {
  if (auto err = check_internal_agent(e.agent_id, known)) return err;
  if (auto err = check_agent_time(e.agent_id, e.start, ledger)) return err;
  if (e.duration_ms < 0)
    return fail(ValidationCode::negative_duration, "iteration duration is negative");
  if (!in_session(e.start, session) || e.end() > session.duration_ms)
    return fail(ValidationCode::timestamp_out_of_range, "iteration extends outside session");
  if (e.breakdown) {
    const auto& b = *e.breakdown;
    if (b.perception_ms < 0 || b.reasoning_ms < 0 || b.action_ms < 0)
      return fail(ValidationCode::negative_duration, "negative breakdown component");
    if (b.total() != e.duration_ms)
      return fail(ValidationCode::invalid_field, "breakdown does not sum to duration");
  }
  return std::nullopt;
}

std::optional<ValidationError> check(const SimpleEvent& e, const SessionInfo& session,
                                     const AgentSet& known, const LifecycleLedger& ledger) {
  if (auto err = check_internal_agent(e.agent_id, known)) return err;
  if (auto err = check_agent_time(e.agent_id, e.at, ledger)) return err;
  if (!in_session(e.at, session))
    return fail(ValidationCode::timestamp_out_of_range, "simple event outside session");
  return std::nullopt;
}

std::optional<ValidationError> check_endpoint(const Endpoint& ep, const SessionInfo& session,
                                              const AgentSet& known) {
  if (ep.platform_id.empty() || ep.agent_id.empty())
    return fail(ValidationCode::invalid_field, "endpoint with empty platform or agent id");
  if (ep.is_external != (ep.platform_id != session.platform_name))
    return fail(ValidationCode::invalid_field,
                "endpoint external flag disagrees with platform '" + ep.platform_id + "'");
  if (!ep.is_external) return check_internal_agent(ep.agent_id, known);
  return std::nullopt;
}

std::optional<ValidationError> check(const MessageEvent& e, const SessionInfo& session,
                                     const AgentSet& known, const LifecycleLedger&) {
  if (e.message_id.empty()) return fail(ValidationCode::invalid_field, "empty message id");
  if (e.headers.performative.empty())
    return fail(ValidationCode::invalid_field, "empty performative");
  if (auto err = check_endpoint(e.sender, session, known)) return err;
  if (auto err = check_endpoint(e.receiver, session, known)) return err;
  if (e.sender.is_external && e.receiver.is_external)
    return fail(ValidationCode::invalid_field, "message between two external endpoints");
  const bool inter = e.sender.is_external != e.receiver.is_external;
  if (inter != (e.scope == MessageScope::inter_platform))
    return fail(ValidationCode::invalid_field, "message scope disagrees with endpoints");
  if (!in_session(e.sent_at, session))
    return fail(ValidationCode::timestamp_out_of_range, "message sent outside session");
  if (e.received_at) {
    if (*e.received_at < e.sent_at)
      return fail(ValidationCode::causality_violation, "message received before it was sent");
    if (!in_session(*e.received_at, session))
      return fail(ValidationCode::timestamp_out_of_range, "message received outside session");
  }
  return std::nullopt;
}

std::optional<ValidationError> check(const CpuSample& e, const SessionInfo& session,
                                     const AgentSet&, const LifecycleLedger& ledger) {
  if (e.load_centipct < 0 || e.load_centipct > 10000)
    return fail(ValidationCode::invalid_field, "cpu load outside [0, 100]");
  if (!in_session(e.at, session))
    return fail(ValidationCode::timestamp_out_of_range, "cpu sample outside session");
  if (ledger.last_cpu_at() && e.at <= *ledger.last_cpu_at())
    return fail(ValidationCode::timestamp_out_of_range, "cpu samples must strictly increase");
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::unknown_agent: return "UnknownAgent";
    case ValidationCode::timestamp_out_of_range: return "TimestampOutOfRange";
    case ValidationCode::negative_duration: return "NegativeDuration";
    case ValidationCode::lifecycle_order_violation: return "LifecycleOrderViolation";
    case ValidationCode::causality_violation: return "CausalityViolation";
    case ValidationCode::invalid_field: return "InvalidField";
  }
  return "?";
}

LifecycleLedger::State LifecycleLedger::state(const std::string& agent_id) const {
  auto it = tracks_.find(agent_id);
  return it == tracks_.end() ? State::absent : it->second.state;
}

std::optional<TimestampMs> LifecycleLedger::last_at(const std::string& agent_id) const {
  auto it = tracks_.find(agent_id);
  return it == tracks_.end() ? std::nullopt : it->second.last_at;
}

void LifecycleLedger::apply(const TraceEvent& event) {
  if (const auto* cpu = std::get_if<CpuSample>(&event)) {
    last_cpu_at_ = cpu->at;
    return;
  }
  const std::string* agent = agent_of(event);
  if (!agent) return;
  auto& track = tracks_[*agent];
  track.last_at = timestamp_of(event);
  if (const auto* lc = std::get_if<LifecycleEvent>(&event))
    track.state = lc->kind == LifecycleKind::destroyed ? State::destroyed : State::live;
}

std::optional<ValidationError> validate_event(const TraceEvent& event, const SessionInfo& session,
                                              const AgentSet& known_agents,
                                              const LifecycleLedger& ledger) {
  return std::visit([&](const auto& e) { return check(e, session, known_agents, ledger); },
                    event);
}

}  // namespace spotter
