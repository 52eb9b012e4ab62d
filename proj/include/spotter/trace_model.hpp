#pragma once

// Event vocabulary and session metadata shared by capture, storage, query
// and scene compilation.
//
// All timestamps are integer milliseconds relative to session start. The
// only exception is SessionInfo::started_at_wallclock_ms, which is UTC
// milliseconds since the Unix epoch.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace spotter {

using TimestampMs = std::int64_t;
using DurationMs = std::int64_t;
using Sequence = std::uint64_t;

inline constexpr int kFormatVersion = 1;

struct SessionInfo {
  std::string session_id;
  std::string platform_name;
  std::int64_t started_at_wallclock_ms = 0;
  DurationMs duration_ms = 0;
  DurationMs slice_ms = 1000;
  DurationMs clock_resolution_ms = 1;
  int format_version = kFormatVersion;

  bool operator==(const SessionInfo&) const = default;
};

enum class Rationality { reactive, deliberative };

struct AgentDescriptor {
  std::string agent_id;
  std::string name;
  std::string role;
  Rationality rationality = Rationality::reactive;

  bool operator==(const AgentDescriptor&) const = default;
};

enum class LifecycleKind { created, started, stopped, suspended, resumed, destroyed };

struct LifecycleEvent {
  std::string agent_id;
  LifecycleKind kind = LifecycleKind::created;
  TimestampMs at = 0;

  bool operator==(const LifecycleEvent&) const = default;
};

/// Time spent by a deliberative agent in each phase of one iteration.
struct IterationBreakdown {
  DurationMs perception_ms = 0;
  DurationMs reasoning_ms = 0;
  DurationMs action_ms = 0;

  DurationMs total() const { return perception_ms + reasoning_ms + action_ms; }
  bool operator==(const IterationBreakdown&) const = default;
};

/// One scheduler grant to an agent: a timed performance event.
struct IterationEvent {
  std::string agent_id;
  TimestampMs start = 0;
  DurationMs duration_ms = 0;
  std::optional<IterationBreakdown> breakdown;

  TimestampMs end() const { return start + duration_ms; }
  bool operator==(const IterationEvent&) const = default;
};

/// Timestamp-only performance event, rendered as a glyph.
struct SimpleEvent {
  std::string agent_id;
  TimestampMs at = 0;
  std::string kind;
  std::optional<std::string> payload;

  bool operator==(const SimpleEvent&) const = default;
};

struct Endpoint {
  std::string platform_id;
  std::string agent_id;
  bool is_external = false;

  bool operator==(const Endpoint&) const = default;
};

struct FipaHeaders {
  std::string performative;
  std::optional<std::string> conversation_id;
  std::string content;
  std::vector<std::pair<std::string, std::string>> other;

  bool operator==(const FipaHeaders&) const = default;
};

enum class MessageScope { intra_platform, inter_platform };

struct MessageEvent {
  std::string message_id;
  Endpoint sender;
  Endpoint receiver;
  TimestampMs sent_at = 0;
  std::optional<TimestampMs> received_at;
  FipaHeaders headers;
  MessageScope scope = MessageScope::intra_platform;

  bool operator==(const MessageEvent&) const = default;
};

/// Host load over the sampling window that ends at `at`. Stored in
/// hundredths of a percent so it survives serialization exactly.
struct CpuSample {
  TimestampMs at = 0;
  std::int32_t load_centipct = 0;

  double load_pct() const { return load_centipct / 100.0; }
  static CpuSample from_pct(TimestampMs at, double pct);
  bool operator==(const CpuSample&) const = default;
};

using TraceEvent =
    std::variant<LifecycleEvent, IterationEvent, SimpleEvent, MessageEvent, CpuSample>;

enum class EventKind { lifecycle, iteration, simple, message, cpu };

/// An event as stored: the payload plus the sink-assigned sequence number
/// that breaks timestamp ties.
struct EventRecord {
  Sequence seq = 0;
  TraceEvent event;

  bool operator==(const EventRecord&) const = default;
};

/// A sealed capture: manifest, agent table and ordered event log.
struct Snapshot {
  SessionInfo session;
  std::vector<AgentDescriptor> agents;
  std::vector<EventRecord> events;

  bool operator==(const Snapshot&) const = default;
};

EventKind kind_of(const TraceEvent& event);

/// Ordering key: lifecycle/simple/cpu `at`, iteration `start`, message `sent_at`.
TimestampMs timestamp_of(const TraceEvent& event);

/// End of the interval the event occupies. Equal to timestamp_of() for
/// point events; messages span to their receipt when known.
TimestampMs end_of(const TraceEvent& event);

/// Agent the event belongs to, if any. Messages report nothing here; use
/// their endpoints.
const std::string* agent_of(const TraceEvent& event);

inline bool record_less(const EventRecord& a, const EventRecord& b) {
  const auto ta = timestamp_of(a.event);
  const auto tb = timestamp_of(b.event);
  return ta != tb ? ta < tb : a.seq < b.seq;
}

std::string_view to_string(Rationality r);
std::string_view to_string(LifecycleKind k);
std::string_view to_string(MessageScope s);
std::string_view to_string(EventKind k);

std::optional<Rationality> parse_rationality(std::string_view s);
std::optional<LifecycleKind> parse_lifecycle_kind(std::string_view s);
std::optional<MessageScope> parse_message_scope(std::string_view s);
std::optional<EventKind> parse_event_kind(std::string_view s);

}  // namespace spotter
