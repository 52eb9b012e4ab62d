#include "spotter/benchmark_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <random>

namespace spotter::bench {

namespace {

/// Busy intervals of the (single) simulated CPU; doubles as the load source
/// for CPU samples.
class BusyLedger final : public LoadSource {
 public:
  void add(TimestampMs start, TimestampMs end) {
    if (end > start) intervals_.emplace_back(start, end);
  }

  std::optional<double> load_pct(TimestampMs from, TimestampMs to) override {
    if (to <= from) return 0.0;
    // intervals never overlap, so ends are sorted as well
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), from,
                               [](TimestampMs t, const auto& iv) { return t < iv.second; });
    DurationMs busy = 0;
    for (; it != intervals_.end() && it->first < to; ++it)
      busy += std::min(to, it->second) - std::max(from, it->first);
    return 100.0 * static_cast<double>(busy) / static_cast<double>(to - from);
  }

 private:
  std::vector<std::pair<TimestampMs, TimestampMs>> intervals_;
};

struct TaskOrder {
  TaskClass size = TaskClass::small;
  bool delegate = false;
};

struct InFlight {
  MessageEvent message;
  TaskOrder order;
};

struct AgentSlot {
  AgentDescriptor descriptor;
  bool overseer = false;
  bool alive = true;
  std::int64_t iterations = 0;
  // WorkerState
  std::int64_t recently_overloaded_until = -1;
  bool acting_as_overseer = false;
  std::deque<InFlight> mailbox;
  std::deque<TaskOrder> queue;
};

class Simulation {
 public:
  Simulation(const ScenarioSpec& spec, ProfilerSink& sink)
      : spec_(spec),
        sink_(sink),
        rng_(spec.seed),
        ledger_(std::make_shared<BusyLedger>()),
        next_sample_at_(spec.sampler_interval_ms) {}

  void run() {
    sink_.set_load_source(ledger_);
    for (int i = 0; i < spec_.overseers; ++i) create_agent(true, 0);
    for (int i = 0; i < spec_.initial_workers; ++i) create_agent(false, 0);
    if (spec_.phases.empty()) stop(0);

    const DurationMs period = spec_.slice_ms;
    while (!stopped_) {
      const TimestampMs round_start = cursor_;
      run_round();
      if (stopped_) break;
      TimestampMs next_round = std::max(round_start + period, cursor_);
      // phases that fall in the idle gap happen exactly on time
      while (!stopped_ && phase_idx_ < spec_.phases.size() &&
             spec_.phases[phase_idx_].at_ms <= next_round) {
        advance(std::max(cursor_, spec_.phases[phase_idx_].at_ms));
        apply_next_phase();
        next_round = std::max(next_round, cursor_);
      }
      if (stopped_) break;
      advance(next_round);
    }
    finish();
  }

 private:
  // --- randomness -------------------------------------------------------

  DurationMs sample_ms(const NormalMs& n, DurationMs floor) {
    const double v = n.stddev_ms > 0 ? std::normal_distribution<double>(n.mean_ms, n.stddev_ms)(rng_)
                                     : n.mean_ms;
    return std::max<DurationMs>(floor, std::lround(v));
  }

  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  TaskClass sample_size() {
    std::discrete_distribution<int> pick(
        {spec_.task_mix[0].weight, spec_.task_mix[1].weight, spec_.task_mix[2].weight});
    return kTaskClasses[static_cast<std::size_t>(pick(rng_))];
  }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  // --- time -------------------------------------------------------------

  /// Moves virtual time forward, taking every CPU sample that falls due and
  /// delivering inter-platform messages whose receipt time has passed.
  void advance(TimestampMs t) {
    for (; next_sample_at_ <= t; next_sample_at_ += spec_.sampler_interval_ms) {
      sink_.advance_to(next_sample_at_);
      sink_.sample_cpu();
    }
    sink_.advance_to(t);
    cursor_ = std::max(cursor_, t);
    while (!external_.empty() && *external_.front().received_at <= cursor_) {
      sink_.record(external_.front());
      external_.pop_front();
    }
  }

  // --- population -------------------------------------------------------

  std::vector<std::size_t> alive_workers(std::optional<std::size_t> except = {}) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].alive && !slots_[i].overseer && i != except) out.push_back(i);
    return out;
  }

  void lifecycle(AgentSlot& slot, LifecycleKind kind, TimestampMs t) {
    sink_.record(LifecycleEvent{slot.descriptor.agent_id, kind, t});
  }

  void create_agent(bool overseer, TimestampMs t) {
    AgentSlot slot;
    slot.overseer = overseer;
    char id[32];
    if (overseer) {
      std::snprintf(id, sizeof id, "master%d", ++overseer_count_);
      slot.descriptor = AgentDescriptor{id, id, "overseer", Rationality::deliberative};
    } else {
      std::snprintf(id, sizeof id, "agent%03d", ++worker_count_);
      slot.descriptor = AgentDescriptor{id, id, "worker", Rationality::reactive};
    }
    sink_.register_agent(slot.descriptor);
    lifecycle(slot, LifecycleKind::created, t);
    lifecycle(slot, LifecycleKind::started, t);
    slots_.push_back(std::move(slot));
  }

  void retire_worker(AgentSlot& slot, TimestampMs t) {
    // whatever is still in the mailbox is read and refused on the way out
    for (auto& in : slot.mailbox) {
      in.message.received_at = t;
      sink_.record(in.message);
      sink_.record(SimpleEvent{slot.descriptor.agent_id, t, kMessageReceived,
                               in.message.message_id});
      sink_.record(SimpleEvent{slot.descriptor.agent_id, t, kTaskRefused,
                               std::string(to_string(in.order.size))});
    }
    slot.mailbox.clear();
    slot.queue.clear();
    lifecycle(slot, LifecycleKind::stopped, t);
    lifecycle(slot, LifecycleKind::destroyed, t);
    slot.alive = false;
  }

  void apply_next_phase() {
    const Phase& phase = spec_.phases[phase_idx_++];
    const TimestampMs t = cursor_;
    switch (phase.action) {
      case PhaseAction::set_workers: {
        auto workers = alive_workers();
        const auto target = static_cast<std::size_t>(phase.value);
        for (std::size_t n = workers.size(); n < target; ++n) create_agent(false, t);
        // newest workers leave first
        for (std::size_t n = workers.size(); n > target; --n) retire_worker(slots_[workers[n - 1]], t);
        break;
      }
      case PhaseAction::pause: {
        for (auto& s : slots_)
          if (s.alive) lifecycle(s, LifecycleKind::suspended, t);
        advance(t + phase.value);
        for (auto& s : slots_)
          if (s.alive) lifecycle(s, LifecycleKind::resumed, cursor_);
        break;
      }
      case PhaseAction::stop:
        stop(t);
        return;
    }
    // without an explicit stop the session ends with its last phase
    if (phase_idx_ == spec_.phases.size()) stop(cursor_);
  }

  void apply_due_phases() {
    while (!stopped_ && phase_idx_ < spec_.phases.size() &&
           spec_.phases[phase_idx_].at_ms <= cursor_)
      apply_next_phase();
  }

  void stop(TimestampMs t) {
    advance(t);
    for (auto& s : slots_)
      if (s.alive) lifecycle(s, LifecycleKind::stopped, t);
    stopped_ = true;
  }

  void finish() {
    // undelivered messages are recorded as sent but never received
    for (auto& s : slots_)
      for (auto& in : s.mailbox) sink_.record(in.message);
    for (auto& m : external_) {
      m.received_at.reset();
      sink_.record(m);
    }
    external_.clear();
  }

  // --- messaging --------------------------------------------------------

  void send(const AgentSlot& from, TimestampMs at, TaskOrder order,
            std::optional<std::size_t> to_slot) {
    char id[32];
    std::snprintf(id, sizeof id, "msg-%06llu", static_cast<unsigned long long>(++message_count_));
    MessageEvent m;
    m.message_id = id;
    m.sender = Endpoint{spec_.platform_name, from.descriptor.agent_id, false};
    m.sent_at = at;
    m.headers.performative = "request";
    m.headers.conversation_id = std::string("conv-") + (id + 4);
    m.headers.content = std::string(order.delegate ? "(delegate :size " : "(execute :size ") +
                        std::string(to_string(order.size)) + ")";
    m.headers.other = {{"ontology", "benchmark"}, {"language", "sexpr"}};
    if (to_slot) {
      m.receiver = Endpoint{spec_.platform_name, slots_[*to_slot].descriptor.agent_id, false};
      m.scope = MessageScope::intra_platform;
      slots_[*to_slot].mailbox.push_back(InFlight{std::move(m), order});
    } else {
      char remote[32];
      std::snprintf(remote, sizeof remote, "worker%02zu", pick(4) + 1);
      m.receiver = Endpoint{spec_.external_platform, remote, true};
      m.scope = MessageScope::inter_platform;
      m.received_at = at + kExternalLatencyMs;
      external_.push_back(std::move(m));
    }
  }

  /// Orders a task from `from`; the target is a live worker other than the
  /// sender or, with inter_platform_fraction, a remote agent.
  void order_task(const AgentSlot& from, std::optional<std::size_t> self, TimestampMs at,
                  TaskOrder order) {
    if (chance(spec_.inter_platform_fraction)) {
      send(from, at, order, std::nullopt);
      return;
    }
    auto workers = alive_workers(self);
    if (workers.empty()) return;
    send(from, at, order, workers[pick(workers.size())]);
  }

  // --- scheduling -------------------------------------------------------

  void run_round() {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].alive) order.push_back(i);
    // overseers come first: they were created first and never retire

    burst_.reset();
    if (spec_.overseers >= 2 && chance(spec_.burst_prob)) {
      auto workers = alive_workers();
      if (!workers.empty()) burst_ = std::pair{workers[pick(workers.size())], sample_size()};
    }

    for (auto idx : order) {
      apply_due_phases();
      if (stopped_) return;
      if (!slots_[idx].alive) continue;
      if (slots_[idx].overseer)
        overseer_iteration(idx);
      else
        worker_iteration(idx);
    }
  }

  void overseer_iteration(std::size_t idx) {
    AgentSlot& self = slots_[idx];
    const TimestampMs start = cursor_;
    ++self.iterations;
    const DurationMs d = sample_ms(spec_.overseer_cost, 1);
    const DurationMs perception = d / 4;
    const DurationMs reasoning = d / 2;
    ledger_->add(start, start + d);
    advance(start + d);
    sink_.record(IterationEvent{self.descriptor.agent_id, start, d,
                                IterationBreakdown{perception, reasoning, d - perception - reasoning}});

    if (burst_) {
      send(self, start + d, TaskOrder{burst_->second, false}, burst_->first);
    } else if (chance(spec_.request_prob)) {
      const TaskOrder order{sample_size(), chance(spec_.delegation_prob)};
      order_task(self, std::nullopt, start + d, order);
    }
  }

  void worker_iteration(std::size_t idx) {
    AgentSlot& self = slots_[idx];
    const std::string& id = self.descriptor.agent_id;
    const TimestampMs start = cursor_;
    ++self.iterations;

    for (auto& in : self.mailbox) {
      in.message.received_at = start;
      sink_.record(in.message);
      sink_.record(SimpleEvent{id, start, kMessageReceived, in.message.message_id});
      self.queue.push_back(in.order);
    }
    self.mailbox.clear();

    DurationMs d = 0;
    std::optional<TaskOrder> delegated;
    if (self.queue.empty()) {
      d = sample_ms(spec_.idle_cost, 0);
    } else {
      const TaskOrder task = self.queue.front();
      self.queue.pop_front();
      if (task.delegate) {
        self.acting_as_overseer = true;
        d = sample_ms(spec_.overseer_cost, 1);
        delegated = TaskOrder{task.size, false};
      } else if (self.iterations <= self.recently_overloaded_until) {
        sink_.record(SimpleEvent{id, start, kTaskRefused, std::string(to_string(task.size))});
        d = sample_ms(spec_.idle_cost, 0);
      } else {
        d = sample_ms(spec_.task(task.size).duration, 1);
        if (d > spec_.slice_ms)
          self.recently_overloaded_until = self.iterations + spec_.refusal_cooldown_iterations;
      }
    }

    ledger_->add(start, start + d);
    advance(start + d);
    sink_.record(IterationEvent{id, start, d, std::nullopt});

    if (delegated) {
      order_task(slots_[idx], idx, start + d, *delegated);
      slots_[idx].acting_as_overseer = false;
    }
  }

  static constexpr DurationMs kExternalLatencyMs = 2;

  const ScenarioSpec& spec_;
  ProfilerSink& sink_;
  std::mt19937_64 rng_;
  std::shared_ptr<BusyLedger> ledger_;
  std::vector<AgentSlot> slots_;
  std::deque<MessageEvent> external_;
  std::optional<std::pair<std::size_t, TaskClass>> burst_;
  TimestampMs cursor_ = 0;
  TimestampMs next_sample_at_;
  std::size_t phase_idx_ = 0;
  bool stopped_ = false;
  int overseer_count_ = 0;
  int worker_count_ = 0;
  std::uint64_t message_count_ = 0;
};

}  // namespace

void begin_benchmark_session(const ScenarioSpec& spec, ProfilerSink& sink,
                             std::shared_ptr<Clock> clock) {
  validate(spec);
  SinkOptions options;
  options.session_id = spec.platform_name + "-" + std::to_string(spec.seed);
  options.sampler_interval_ms = spec.sampler_interval_ms;
  sink.begin_session(spec.platform_name, spec.slice_ms, std::move(clock), std::move(options));
}

void drive_scenario(const ScenarioSpec& spec, ProfilerSink& sink) {
  validate(spec);
  if (!sink.is_open()) throw SinkStateError(SinkStateError::Kind::session_closed, "no open session");
  Simulation(spec, sink).run();
}

Snapshot run_scenario(const ScenarioSpec& spec, ProfilerSink& sink) {
  drive_scenario(spec, sink);
  return sink.end_session();
}

SnapshotHandle run_scenario(const ScenarioSpec& spec, ProfilerSink& sink,
                            const std::filesystem::path& out) {
  drive_scenario(spec, sink);
  return sink.end_session(out);
}

Snapshot simulate(const ScenarioSpec& spec) {
  ProfilerSink sink;
  begin_benchmark_session(spec, sink, std::make_shared<VirtualClock>(spec.epoch_utc_ms));
  return run_scenario(spec, sink);
}

}  // namespace spotter::bench
