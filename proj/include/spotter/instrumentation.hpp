#pragma once

// Capture side: the sink a platform (or the benchmark simulator) reports
// events to. Events are validated on arrival, stamped with a sequence
// number and buffered; end_session() orders and seals them into a snapshot.

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/clock.hpp"
#include "spotter/trace_model.hpp"
#include "spotter/validation.hpp"

namespace spotter {

class SinkStateError : public std::logic_error {
 public:
  enum class Kind { session_already_open, session_closed, invalid_argument };

  SinkStateError(Kind kind, const std::string& what) : std::logic_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ValidationFailure : public std::invalid_argument {
 public:
  explicit ValidationFailure(ValidationError error)
      : std::invalid_argument(std::string(to_string(error.code)) + ": " + error.message),
        error_(std::move(error)) {}
  const ValidationError& error() const { return error_; }

 private:
  ValidationError error_;
};

/// Supplies the load percentage for a sampling window [from, to) in
/// session time. nullopt signals that the reading failed.
class LoadSource {
 public:
  virtual ~LoadSource() = default;
  virtual std::optional<double> load_pct(TimestampMs from, TimestampMs to) = 0;
};

/// Whole-host load from /proc/stat deltas between consecutive calls.
class HostLoadSource final : public LoadSource {
 public:
  std::optional<double> load_pct(TimestampMs from, TimestampMs to) override;

 private:
  std::optional<std::pair<std::uint64_t, std::uint64_t>> last_;  // busy, total jiffies
};

struct SinkOptions {
  std::optional<std::string> session_id;
  DurationMs sampler_interval_ms = 1000;
  DurationMs clock_resolution_ms = 1;
  std::shared_ptr<LoadSource> load_source;
};

struct SnapshotHandle {
  std::filesystem::path path;
  SessionInfo session;
  std::size_t agent_count = 0;
  std::size_t event_count = 0;
};

class ProfilerSink {
 public:
  ProfilerSink() = default;
  ProfilerSink(const ProfilerSink&) = delete;
  ProfilerSink& operator=(const ProfilerSink&) = delete;

  void begin_session(std::string platform_name, DurationMs slice_ms, std::shared_ptr<Clock> clock,
                     SinkOptions options = {});

  void register_agent(AgentDescriptor agent);

  /// Safe to call from many threads. Throws ValidationFailure or
  /// SinkStateError(session_closed). A disabled sink drops the event.
  void record(TraceEvent event);

  /// Reads the load source for the window ending now and records the sample.
  CpuSample sample_cpu();
  void set_load_source(std::shared_ptr<LoadSource> source);

  /// Moves the session clock to `session_t` ms after the session began
  /// (a jump on virtual time, a sleep on wall time).
  void advance_to(TimestampMs session_t);

  /// Orders the buffer, seals the snapshot and writes it to `path`.
  SnapshotHandle end_session(const std::filesystem::path& path);
  /// Same as above but hands the sealed snapshot back instead of writing it.
  Snapshot end_session();

  void set_enabled(bool enabled) { enabled_.store(enabled, std::memory_order_relaxed); }
  bool enabled() const { return enabled_.load(std::memory_order_relaxed); }

  bool is_open() const;
  /// Milliseconds since the session began.
  TimestampMs now() const;
  const SessionInfo& session() const { return session_; }
  DurationMs sampler_interval_ms() const { return options_.sampler_interval_ms; }
  std::size_t buffered() const;
  std::vector<std::string> warnings() const;

 private:
  enum class State { idle, open, closed };

  Snapshot seal_locked();

  mutable std::mutex mutex_;
  State state_ = State::idle;
  std::atomic<bool> enabled_{true};
  SessionInfo session_;
  SinkOptions options_;
  std::shared_ptr<Clock> clock_;
  std::int64_t origin_ms_ = 0;
  std::vector<AgentDescriptor> agents_;
  AgentSet known_;
  LifecycleLedger ledger_;
  std::vector<EventRecord> buffer_;
  Sequence next_seq_ = 0;
  std::optional<CpuSample> last_sample_;
  std::vector<std::string> warnings_;
};

}  // namespace spotter
