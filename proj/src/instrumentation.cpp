#include "spotter/instrumentation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "spotter/snapshot_store.hpp"

namespace spotter {

namespace {

std::string random_session_id(const std::string& platform, std::int64_t utc_ms) {
  std::random_device rd;
  std::ostringstream os;
  os << platform << '-' << utc_ms << '-' << std::hex << std::setw(8) << std::setfill('0') << rd();
  return os.str();
}

}  // namespace

std::optional<double> HostLoadSource::load_pct(TimestampMs, TimestampMs) {
  std::ifstream stat("/proc/stat");
  std::string cpu;
  std::uint64_t user = 0, nice = 0, system = 0, idle = 0, iowait = 0, irq = 0, softirq = 0,
                steal = 0;
  if (!(stat >> cpu >> user >> nice >> system >> idle >> iowait >> irq >> softirq >> steal) ||
      cpu != "cpu")
    return std::nullopt;
  const std::uint64_t idle_all = idle + iowait;
  const std::uint64_t total = user + nice + system + idle_all + irq + softirq + steal;
  const std::uint64_t busy = total - idle_all;
  auto prev = last_;
  last_ = {busy, total};
  if (!prev || total <= prev->second) return 0.0;
  return 100.0 * static_cast<double>(busy - prev->first) /
         static_cast<double>(total - prev->second);
}

void ProfilerSink::begin_session(std::string platform_name, DurationMs slice_ms,
                                 std::shared_ptr<Clock> clock, SinkOptions options) {
  std::lock_guard lock(mutex_);
  if (state_ == State::open)
    throw SinkStateError(SinkStateError::Kind::session_already_open, "session already open");
  if (slice_ms < 1)
    throw SinkStateError(SinkStateError::Kind::invalid_argument, "slice_ms must be positive");
  if (options.sampler_interval_ms < 1 || options.clock_resolution_ms < 1)
    throw SinkStateError(SinkStateError::Kind::invalid_argument,
                         "sampler interval and clock resolution must be positive");
  if (!clock) throw SinkStateError(SinkStateError::Kind::invalid_argument, "no clock");
  if (platform_name.empty())
    throw SinkStateError(SinkStateError::Kind::invalid_argument, "empty platform name");

  clock_ = std::move(clock);
  options_ = std::move(options);
  origin_ms_ = clock_->now_ms();

  session_ = SessionInfo{};
  session_.platform_name = std::move(platform_name);
  session_.started_at_wallclock_ms = clock_->utc_ms();
  session_.slice_ms = slice_ms;
  session_.clock_resolution_ms = options_.clock_resolution_ms;
  session_.session_id = options_.session_id.value_or(
      random_session_id(session_.platform_name, session_.started_at_wallclock_ms));

  agents_.clear();
  known_.clear();
  ledger_ = LifecycleLedger{};
  buffer_.clear();
  next_seq_ = 0;
  last_sample_.reset();
  warnings_.clear();
  state_ = State::open;
}

void ProfilerSink::register_agent(AgentDescriptor agent) {
  std::lock_guard lock(mutex_);
  if (state_ != State::open)
    throw SinkStateError(SinkStateError::Kind::session_closed, "no open session");
  if (agent.agent_id.empty())
    throw SinkStateError(SinkStateError::Kind::invalid_argument, "empty agent id");
  if (!known_.insert(agent.agent_id).second)
    throw SinkStateError(SinkStateError::Kind::invalid_argument,
                         "agent '" + agent.agent_id + "' already registered");
  if (agent.name.empty()) agent.name = agent.agent_id;
  agents_.push_back(std::move(agent));
}

void ProfilerSink::record(TraceEvent event) {
  if (!enabled_.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(mutex_);
  if (state_ != State::open)
    throw SinkStateError(SinkStateError::Kind::session_closed, "session closed");
  SessionInfo bounds = session_;
  bounds.duration_ms = clock_->now_ms() - origin_ms_;
  if (auto err = validate_event(event, bounds, known_, ledger_)) throw ValidationFailure(*err);
  ledger_.apply(event);
  buffer_.push_back(EventRecord{next_seq_++, std::move(event)});
}

CpuSample ProfilerSink::sample_cpu() {
  TimestampMs at = 0;
  std::shared_ptr<LoadSource> source;
  {
    std::lock_guard lock(mutex_);
    if (state_ != State::open)
      throw SinkStateError(SinkStateError::Kind::session_closed, "session closed");
    at = clock_->now_ms() - origin_ms_;
    if (last_sample_ && last_sample_->at >= at) return *last_sample_;
    source = options_.load_source;
  }
  const TimestampMs from = std::max<TimestampMs>(0, at - options_.sampler_interval_ms);
  std::optional<double> load = 0.0;
  if (source && from < at) load = source->load_pct(from, at);
  if (!load) {
    std::lock_guard lock(mutex_);
    warnings_.push_back("cpu read failed at t=" + std::to_string(at) + ", recorded 0");
  }
  const CpuSample sample = CpuSample::from_pct(at, load.value_or(0.0));
  if (enabled()) {
    std::lock_guard lock(mutex_);
    SessionInfo bounds = session_;
    bounds.duration_ms = at;
    if (!validate_event(sample, bounds, known_, ledger_)) {
      ledger_.apply(sample);
      buffer_.push_back(EventRecord{next_seq_++, sample});
    }
    last_sample_ = sample;
  }
  return sample;
}

void ProfilerSink::set_load_source(std::shared_ptr<LoadSource> source) {
  std::lock_guard lock(mutex_);
  options_.load_source = std::move(source);
}

void ProfilerSink::advance_to(TimestampMs session_t) {
  std::shared_ptr<Clock> clock;
  std::int64_t origin = 0;
  {
    std::lock_guard lock(mutex_);
    if (state_ != State::open)
      throw SinkStateError(SinkStateError::Kind::session_closed, "session closed");
    clock = clock_;
    origin = origin_ms_;
  }
  clock->advance_to(origin + session_t);
}

Snapshot ProfilerSink::seal_locked() {
  if (state_ != State::open)
    throw SinkStateError(SinkStateError::Kind::session_closed, "session closed");
  session_.duration_ms = clock_->now_ms() - origin_ms_;
  std::sort(buffer_.begin(), buffer_.end(), record_less);
  Snapshot snapshot{session_, std::move(agents_), std::move(buffer_)};
  agents_.clear();
  buffer_.clear();
  state_ = State::closed;
  return snapshot;
}

Snapshot ProfilerSink::end_session() {
  std::lock_guard lock(mutex_);
  return seal_locked();
}

SnapshotHandle ProfilerSink::end_session(const std::filesystem::path& path) {
  Snapshot snapshot = end_session();
  write_snapshot(path, snapshot);
  return SnapshotHandle{path, snapshot.session, snapshot.agents.size(), snapshot.events.size()};
}

bool ProfilerSink::is_open() const {
  std::lock_guard lock(mutex_);
  return state_ == State::open;
}

TimestampMs ProfilerSink::now() const {
  std::lock_guard lock(mutex_);
  if (!clock_) return 0;
  return clock_->now_ms() - origin_ms_;
}

std::size_t ProfilerSink::buffered() const {
  std::lock_guard lock(mutex_);
  return buffer_.size();
}

std::vector<std::string> ProfilerSink::warnings() const {
  std::lock_guard lock(mutex_);
  return warnings_;
}

}  // namespace spotter
