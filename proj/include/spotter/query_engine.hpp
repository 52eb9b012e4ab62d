#pragma once

// Post-processing over a sealed snapshot: the flat profile, session-wide
// statistics and the windowed lookups the scene compiler and HTTP API use.

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spotter/snapshot_store.hpp"
#include "spotter/trace_model.hpp"

namespace spotter {

class QueryError : public std::runtime_error {
 public:
  enum class Kind { empty_snapshot, invalid_range, invalid_bucket, unknown_message };

  QueryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct FlatProfileRow {
  std::string agent_id;
  std::string name;
  std::int64_t iterations_nonzero = 0;
  std::int64_t overload_count = 0;
  DurationMs activity_ms = 0;
  /// Share of session activity in hundredths of a percent, rounded half-up.
  std::int64_t pct_centi = 0;
  DurationMs max_ms = 0;
  /// activity / iterations, truncated to whole ms.
  DurationMs avg_ms = 0;
  std::int64_t msgs_sent = 0;
  std::int64_t msgs_received = 0;
  std::optional<IterationBreakdown> breakdown_ms;

  double pct_session() const { return pct_centi / 100.0; }
  bool operator==(const FlatProfileRow&) const = default;
};

struct ProfileHeader {
  DurationMs total_duration_ms = 0;
  DurationMs total_activity_ms = 0;
  std::int64_t messages_sent = 0;
  std::int64_t messages_received = 0;
  DurationMs slice_ms = 0;

  bool operator==(const ProfileHeader&) const = default;
};

/// Rows are sorted by activity descending, then name ascending.
struct FlatProfile {
  ProfileHeader header;
  std::vector<FlatProfileRow> rows;

  bool operator==(const FlatProfile&) const = default;
};

struct GlobalStats {
  DurationMs total_duration_ms = 0;
  DurationMs total_activity_ms = 0;
  std::int64_t total_messages = 0;
  /// Mean over 1 s buckets of the number of distinct agents running a
  /// non-zero iteration that overlaps the bucket.
  double avg_active_agents_per_sec = 0.0;

  bool operator==(const GlobalStats&) const = default;
};

FlatProfile flat_profile(EventStream& stream);
FlatProfile flat_profile(const Snapshot& snapshot);

GlobalStats global_stats(EventStream& stream);
GlobalStats global_stats(const Snapshot& snapshot);

/// Half-up rounding of 100 * part / whole to hundredths. 0 when whole is 0.
std::int64_t percent_centi(std::int64_t part, std::int64_t whole);

struct RangeFilter {
  /// Keep events owned by (or, for messages, sent or received by) these
  /// agents. CPU samples carry no agent and are dropped under this filter.
  std::optional<std::set<std::string>> agents;
  std::optional<std::set<EventKind>> kinds;
};

struct RangeHit {
  const EventRecord* record = nullptr;
  bool clipped_start = false;  // begins before t0
  bool clipped_end = false;    // extends past t1
  bool clipped() const { return clipped_start || clipped_end; }
};

/// Events whose [begin, end) meets [t0, t1). Point events count when
/// t0 <= at < t1. When t1 equals the session duration the range also
/// includes events stamped exactly at the end.
std::vector<RangeHit> events_in_range(const Snapshot& snapshot, TimestampMs t0, TimestampMs t1,
                                      const RangeFilter& filter = {});

struct CpuBucket {
  TimestampMs bucket_start = 0;
  double mean_load_pct = 0.0;
  double max_load_pct = 0.0;
  std::size_t samples = 0;
  bool empty = true;
};

/// A sample stamped `at` describes the window ending at `at`, so it lands in
/// the bucket containing at - 1.
std::vector<CpuBucket> cpu_series(const Snapshot& snapshot, DurationMs bucket_ms);

const MessageEvent& message_detail(const Snapshot& snapshot, std::string_view message_id);

/// Read-only view over one loaded snapshot with the lookups the service
/// needs precomputed. Safe to share between threads.
class QueryEngine {
 public:
  explicit QueryEngine(std::shared_ptr<const Snapshot> snapshot);

  const Snapshot& snapshot() const { return *snapshot_; }
  const FlatProfile& profile() const { return profile_; }
  const GlobalStats& stats() const { return stats_; }
  const MessageEvent& message(std::string_view message_id) const;

 private:
  std::shared_ptr<const Snapshot> snapshot_;
  FlatProfile profile_;
  GlobalStats stats_;
  std::unordered_map<std::string, const MessageEvent*> messages_;
};

}  // namespace spotter
