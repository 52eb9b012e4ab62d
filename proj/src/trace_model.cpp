#include "spotter/trace_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace spotter {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::array<std::string_view, 6> kLifecycleNames = {
    "created", "started", "stopped", "suspended", "resumed", "destroyed"};

constexpr std::array<std::string_view, 5> kEventKindNames = {
    "lifecycle", "iteration", "simple", "message", "cpu"};

}  // namespace

CpuSample CpuSample::from_pct(TimestampMs at, double pct) {
  const double clamped = std::clamp(pct, 0.0, 100.0);
  return CpuSample{at, static_cast<std::int32_t>(std::lround(clamped * 100.0))};
}

EventKind kind_of(const TraceEvent& event) {
  return static_cast<EventKind>(event.index());
}

TimestampMs timestamp_of(const TraceEvent& event) {
  return std::visit(overloaded{
                        [](const LifecycleEvent& e) { return e.at; },
                        [](const IterationEvent& e) { return e.start; },
                        [](const SimpleEvent& e) { return e.at; },
                        [](const MessageEvent& e) { return e.sent_at; },
                        [](const CpuSample& e) { return e.at; },
                    },
                    event);
}

TimestampMs end_of(const TraceEvent& event) {
  return std::visit(overloaded{
                        [](const IterationEvent& e) { return e.end(); },
                        [](const MessageEvent& e) {
                          return std::max(e.sent_at, e.received_at.value_or(e.sent_at));
                        },
                        [](const LifecycleEvent& e) { return e.at; },
                        [](const SimpleEvent& e) { return e.at; },
                        [](const CpuSample& e) { return e.at; },
                    },
                    event);
}

const std::string* agent_of(const TraceEvent& event) {
  return std::visit(overloaded{
                        [](const LifecycleEvent& e) -> const std::string* { return &e.agent_id; },
                        [](const IterationEvent& e) -> const std::string* { return &e.agent_id; },
                        [](const SimpleEvent& e) -> const std::string* { return &e.agent_id; },
                        [](const MessageEvent&) -> const std::string* { return nullptr; },
                        [](const CpuSample&) -> const std::string* { return nullptr; },
                    },
                    event);
}

std::string_view to_string(Rationality r) {
  return r == Rationality::reactive ? "reactive" : "deliberative";
}

std::string_view to_string(LifecycleKind k) { return kLifecycleNames[static_cast<size_t>(k)]; }

std::string_view to_string(MessageScope s) {
  return s == MessageScope::intra_platform ? "intra_platform" : "inter_platform";
}

std::string_view to_string(EventKind k) { return kEventKindNames[static_cast<size_t>(k)]; }

std::optional<Rationality> parse_rationality(std::string_view s) {
  if (s == "reactive") return Rationality::reactive;
  if (s == "deliberative") return Rationality::deliberative;
  return std::nullopt;
}

std::optional<LifecycleKind> parse_lifecycle_kind(std::string_view s) {
  for (size_t i = 0; i < kLifecycleNames.size(); ++i)
    if (kLifecycleNames[i] == s) return static_cast<LifecycleKind>(i);
  return std::nullopt;
}

std::optional<MessageScope> parse_message_scope(std::string_view s) {
  if (s == "intra_platform") return MessageScope::intra_platform;
  if (s == "inter_platform") return MessageScope::inter_platform;
  return std::nullopt;
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (size_t i = 0; i < kEventKindNames.size(); ++i)
    if (kEventKindNames[i] == s) return static_cast<EventKind>(i);
  return std::nullopt;
}

}  // namespace spotter
