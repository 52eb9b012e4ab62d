#pragma once

// Snapshot builders shared by the unit tests and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

#include "spotter/trace_model.hpp"

namespace spotter::testing {

// --- reference flat profile of an 18:50 benchmark session, cell for cell --

struct ReferenceRow {
  const char* agent;
  std::int64_t iterations;
  std::int64_t overloads;
  const char* activity;  // mm:ss.mmm or ss.mmm
  const char* pct;
  const char* max;
  const char* avg;
  std::int64_t sent;
  std::int64_t received;
};

extern const std::vector<ReferenceRow> kReferenceProfile;
inline constexpr const char* kReferenceSessionTime = "18:50.691";
inline constexpr const char* kReferenceTotalActivity = "10:29.164";
inline constexpr std::int64_t kReferenceMessagesSent = 1206;
inline constexpr std::int64_t kReferenceMessagesReceived = 1206;

/// "1:08.564" -> 68564, "0.202" -> 202.
std::int64_t parse_clock_ms(const std::string& s);

/// Iteration durations for one row: one at Max(T), overloads - 1 just over
/// the slice, the rest spread evenly at or below the slice (or Max(T) when
/// the row has no overloads). Throws if the row cannot be realised.
std::vector<std::int64_t> reference_iterations(const ReferenceRow& row, std::int64_t slice_ms);

/// A snapshot whose flat profile should print as the reference table.
Snapshot reference_snapshot();

// --- random valid snapshots ------------------------------------------------

struct RandomSpec {
  std::uint64_t seed = 1;
  int max_agents = 12;
  int max_iterations = 400;
  int max_messages = 200;
  int max_simple = 60;
  bool with_external = true;
};

/// Sequentially scheduled iterations, lifecycle events, messages (some
/// inter-platform, some never received), simple events and CPU samples.
/// Every event passes validate_event in log order.
Snapshot random_snapshot(const RandomSpec& spec);

/// Exactly `events` events spread over a few agents, for size and speed
/// checks.
Snapshot bulk_snapshot(std::size_t events, std::uint64_t seed = 7);

Snapshot empty_snapshot();
Snapshot single_event_snapshot();

/// Runs every event through validate_event; returns the first failure text
/// or an empty string.
std::string first_invalid_event(const Snapshot& snapshot);

}  // namespace spotter::testing
