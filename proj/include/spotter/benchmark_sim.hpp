#pragma once

// Deterministic model of a time-slice agent platform running the overseer /
// worker benchmark. Agents get the CPU one at a time in a fixed order, one
// iteration each per round, and are never preempted.

#include <filesystem>

#include "spotter/classify.hpp"
#include "spotter/instrumentation.hpp"
#include "spotter/scenario.hpp"

namespace spotter::bench {

inline SliceUse classify_task_duration(DurationMs duration_ms, DurationMs slice_ms,
                                       ClassThresholds thresholds = {}) {
  return classify_slice_use(duration_ms, slice_ms, thresholds);
}

/// Simple-event kinds the simulator emits.
inline constexpr const char* kMessageReceived = "message_received";
inline constexpr const char* kTaskRefused = "task_refused";

/// Runs the scenario against an open sink, advancing the sink's clock,
/// and leaves the session open. Management actions (phases) take effect at
/// their configured time, or when the iteration running at that moment
/// finishes.
void drive_scenario(const ScenarioSpec& spec, ProfilerSink& sink);

/// drive_scenario() followed by end_session().
Snapshot run_scenario(const ScenarioSpec& spec, ProfilerSink& sink);
SnapshotHandle run_scenario(const ScenarioSpec& spec, ProfilerSink& sink,
                            const std::filesystem::path& out);

/// Opens a sink on virtual time with a session id derived from the seed and
/// runs the scenario. Identical specs give identical snapshots.
Snapshot simulate(const ScenarioSpec& spec);

/// Sink preconfigured for `spec` on the given clock.
void begin_benchmark_session(const ScenarioSpec& spec, ProfilerSink& sink,
                             std::shared_ptr<Clock> clock);

}  // namespace spotter::bench
