#pragma once

// Declarative description of a benchmark run and its config-file form.
//
// The file is line oriented. Blank lines and text after '#' are ignored.
//
//   key = value
//   phase <time> set_workers <n>
//   phase <time> pause <duration>
//   phase <time> stop
//
// Times and durations are integers with an optional unit suffix
// (ms, s, m; default ms). See docs/scenario-format.md for every key.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/trace_model.hpp"

namespace spotter::bench {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class TaskClass { small, medium, large };
inline constexpr std::array<TaskClass, 3> kTaskClasses = {TaskClass::small, TaskClass::medium,
                                                          TaskClass::large};
std::string_view to_string(TaskClass c);

struct NormalMs {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  bool operator==(const NormalMs&) const = default;
};

struct TaskSize {
  NormalMs duration;
  double weight = 1.0;
  bool operator==(const TaskSize&) const = default;
};

enum class PhaseAction { set_workers, pause, stop };

struct Phase {
  TimestampMs at_ms = 0;
  PhaseAction action = PhaseAction::stop;
  /// Worker count for set_workers, pause length in ms for pause.
  std::int64_t value = 0;
  bool operator==(const Phase&) const = default;
};

struct ScenarioSpec {
  std::uint64_t seed = 20090601;
  std::string platform_name = "benchmark";
  std::string external_platform = "remote";
  DurationMs slice_ms = 1000;
  DurationMs sampler_interval_ms = 1000;
  std::int64_t epoch_utc_ms = 1243850400000;  // 2009-06-01T10:00:00Z

  int initial_workers = 12;
  int overseers = 2;

  std::array<TaskSize, 3> task_mix = {TaskSize{{100, 30}, 0.60}, TaskSize{{550, 10}, 0.25},
                                      TaskSize{{3300, 200}, 0.15}};
  NormalMs overseer_cost{7, 3};
  /// Housekeeping cost of an iteration with nothing to do; rounds to 0 often.
  NormalMs idle_cost{0, 1};

  /// Chance an overseer orders a task in a given iteration.
  double request_prob = 0.55;
  /// Chance per round that all overseers send the same order to one worker.
  double burst_prob = 0.05;
  double delegation_prob = 0.05;
  int refusal_cooldown_iterations = 5;
  double inter_platform_fraction = 0.0;

  std::vector<Phase> phases;

  const TaskSize& task(TaskClass c) const { return task_mix[static_cast<std::size_t>(c)]; }
  bool operator==(const ScenarioSpec&) const = default;
};

/// The evaluation run: 12 workers and 2 overseers, 15 more workers at
/// 10 min, a 20 s pause at 14 min, back to 12 workers, stop 5 min later.
ScenarioSpec default_scenario();

/// Throws ScenarioError describing the first violated constraint.
void validate(const ScenarioSpec& spec);

ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::string render_scenario(const ScenarioSpec& spec);

}  // namespace spotter::bench
