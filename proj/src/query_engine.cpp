#include "spotter/query_engine.hpp"

#include <algorithm>
#include <variant>

namespace spotter {

namespace {

void require_manifest(const SessionInfo& session) {
  if (session.session_id.empty())
    throw QueryError(QueryError::Kind::empty_snapshot, "snapshot has no session manifest");
}

struct RowAccumulator {
  FlatProfileRow row;
  bool has_breakdown = false;
};

}  // namespace

std::int64_t percent_centi(std::int64_t part, std::int64_t whole) {
  if (whole <= 0) return 0;
  return (part * 20000 + whole) / (2 * whole);
}

FlatProfile flat_profile(EventStream& stream) {
  const SessionInfo& session = stream.session();
  require_manifest(session);

  std::unordered_map<std::string, std::string> names;
  for (const auto& a : stream.agents()) names.emplace(a.agent_id, a.name);

  std::unordered_map<std::string, RowAccumulator> acc;
  auto row_for = [&](const std::string& agent_id) -> RowAccumulator& {
    auto [it, inserted] = acc.try_emplace(agent_id);
    if (inserted) {
      it->second.row.agent_id = agent_id;
      auto n = names.find(agent_id);
      it->second.row.name = n != names.end() ? n->second : agent_id;
    }
    return it->second;
  };

  // every registered agent gets a row, even one that never ran
  for (const auto& a : stream.agents()) row_for(a.agent_id);

  FlatProfile profile;
  profile.header.total_duration_ms = session.duration_ms;
  profile.header.slice_ms = session.slice_ms;

  EventRecord record;
  while (stream.next(record)) {
    if (const auto* it = std::get_if<IterationEvent>(&record.event)) {
      auto& a = row_for(it->agent_id);
      if (it->duration_ms > 0) {
        ++a.row.iterations_nonzero;
        a.row.activity_ms += it->duration_ms;
        a.row.max_ms = std::max(a.row.max_ms, it->duration_ms);
        if (it->duration_ms > session.slice_ms) ++a.row.overload_count;
        profile.header.total_activity_ms += it->duration_ms;
      }
      if (it->breakdown) {
        if (!a.has_breakdown) a.row.breakdown_ms = IterationBreakdown{};
        a.has_breakdown = true;
        a.row.breakdown_ms->perception_ms += it->breakdown->perception_ms;
        a.row.breakdown_ms->reasoning_ms += it->breakdown->reasoning_ms;
        a.row.breakdown_ms->action_ms += it->breakdown->action_ms;
      }
    } else if (const auto* m = std::get_if<MessageEvent>(&record.event)) {
      if (!m->sender.is_external) {
        ++row_for(m->sender.agent_id).row.msgs_sent;
        ++profile.header.messages_sent;
      }
      if (!m->receiver.is_external) {
        auto& r = row_for(m->receiver.agent_id);
        if (m->received_at) {
          ++r.row.msgs_received;
          ++profile.header.messages_received;
        }
      }
    } else if (const std::string* agent = agent_of(record.event)) {
      row_for(*agent);
    }
  }

  profile.rows.reserve(acc.size());
  for (auto& [id, a] : acc) {
    auto& row = a.row;
    row.pct_centi = percent_centi(row.activity_ms, profile.header.total_activity_ms);
    row.avg_ms = row.iterations_nonzero > 0 ? row.activity_ms / row.iterations_nonzero : 0;
    profile.rows.push_back(std::move(row));
  }
  std::sort(profile.rows.begin(), profile.rows.end(), [](const auto& a, const auto& b) {
    if (a.activity_ms != b.activity_ms) return a.activity_ms > b.activity_ms;
    if (a.name != b.name) return a.name < b.name;
    return a.agent_id < b.agent_id;
  });
  return profile;
}

FlatProfile flat_profile(const Snapshot& snapshot) {
  MemoryEventStream stream(snapshot);
  return flat_profile(stream);
}

GlobalStats global_stats(EventStream& stream) {
  const SessionInfo& session = stream.session();
  require_manifest(session);

  GlobalStats stats;
  stats.total_duration_ms = session.duration_ms;
  const std::int64_t buckets = (session.duration_ms + 999) / 1000;

  // Per agent, the last 1 s bucket already counted as active. Each agent's
  // iterations arrive in start order so buckets only move forward.
  std::unordered_map<std::string, std::int64_t> last_bucket;
  std::int64_t active_bucket_sum = 0;

  EventRecord record;
  while (stream.next(record)) {
    if (const auto* it = std::get_if<IterationEvent>(&record.event)) {
      if (it->duration_ms <= 0) continue;
      stats.total_activity_ms += it->duration_ms;
      if (buckets == 0) continue;
      const std::int64_t first = std::min(it->start / 1000, buckets - 1);
      const std::int64_t last = std::min((it->end() - 1) / 1000, buckets - 1);
      auto [pos, inserted] = last_bucket.try_emplace(it->agent_id, -1);
      const std::int64_t from = std::max(first, pos->second + 1);
      if (last >= from) {
        active_bucket_sum += last - from + 1;
        pos->second = last;
      }
    } else if (const auto* m = std::get_if<MessageEvent>(&record.event)) {
      if (!m->sender.is_external) ++stats.total_messages;
    }
  }
  if (buckets > 0)
    stats.avg_active_agents_per_sec =
        static_cast<double>(active_bucket_sum) / static_cast<double>(buckets);
  return stats;
}

GlobalStats global_stats(const Snapshot& snapshot) {
  MemoryEventStream stream(snapshot);
  return global_stats(stream);
}

std::vector<RangeHit> events_in_range(const Snapshot& snapshot, TimestampMs t0, TimestampMs t1,
                                      const RangeFilter& filter) {
  if (t0 < 0 || t0 > t1 || t1 > snapshot.session.duration_ms) {
    throw QueryError(QueryError::Kind::invalid_range,
                     "invalid range [" + std::to_string(t0) + ", " + std::to_string(t1) + ")");
  }
  const bool closed_end = t1 == snapshot.session.duration_ms;

  auto agent_match = [&](const TraceEvent& e) {
    if (!filter.agents) return true;
    if (const auto* m = std::get_if<MessageEvent>(&e)) {
      return (!m->sender.is_external && filter.agents->contains(m->sender.agent_id)) ||
             (!m->receiver.is_external && filter.agents->contains(m->receiver.agent_id));
    }
    const std::string* agent = agent_of(e);
    return agent && filter.agents->contains(*agent);
  };

  std::vector<RangeHit> hits;
  for (const auto& record : snapshot.events) {
    const TimestampMs begin = timestamp_of(record.event);
    if (begin > t1) break;
    const TimestampMs end = end_of(record.event);
    const bool meets = end > begin ? (begin < t1 && end > t0)
                                   : (begin >= t0 && (begin < t1 || (closed_end && begin == t1)));
    if (!meets) continue;
    if (filter.kinds && !filter.kinds->contains(kind_of(record.event))) continue;
    if (!agent_match(record.event)) continue;
    hits.push_back(RangeHit{&record, begin < t0, end > t1});
  }
  return hits;
}

std::vector<CpuBucket> cpu_series(const Snapshot& snapshot, DurationMs bucket_ms) {
  if (bucket_ms < std::max<DurationMs>(1, snapshot.session.clock_resolution_ms)) {
    throw QueryError(QueryError::Kind::invalid_bucket,
                     "bucket_ms must be at least the clock resolution");
  }
  const DurationMs duration = snapshot.session.duration_ms;
  const std::size_t count =
      static_cast<std::size_t>(std::max<DurationMs>(1, (duration + bucket_ms - 1) / bucket_ms));
  std::vector<CpuBucket> buckets(count);
  std::vector<double> sums(count, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    buckets[i].bucket_start = static_cast<TimestampMs>(i) * bucket_ms;

  for (const auto& record : snapshot.events) {
    const auto* s = std::get_if<CpuSample>(&record.event);
    if (!s) continue;
    auto idx = static_cast<std::size_t>(std::max<TimestampMs>(0, s->at - 1) / bucket_ms);
    idx = std::min(idx, count - 1);
    auto& b = buckets[idx];
    sums[idx] += s->load_pct();
    b.max_load_pct = b.samples == 0 ? s->load_pct() : std::max(b.max_load_pct, s->load_pct());
    ++b.samples;
    b.empty = false;
  }
  for (std::size_t i = 0; i < count; ++i)
    if (buckets[i].samples > 0)
      buckets[i].mean_load_pct = sums[i] / static_cast<double>(buckets[i].samples);
  return buckets;
}

const MessageEvent& message_detail(const Snapshot& snapshot, std::string_view message_id) {
  for (const auto& record : snapshot.events)
    if (const auto* m = std::get_if<MessageEvent>(&record.event); m && m->message_id == message_id)
      return *m;
  throw QueryError(QueryError::Kind::unknown_message,
                   "unknown message '" + std::string(message_id) + "'");
}

QueryEngine::QueryEngine(std::shared_ptr<const Snapshot> snapshot)
    : snapshot_(std::move(snapshot)),
      profile_(flat_profile(*snapshot_)),
      stats_(global_stats(*snapshot_)) {
  for (const auto& record : snapshot_->events)
    if (const auto* m = std::get_if<MessageEvent>(&record.event))
      messages_.emplace(m->message_id, m);
}

const MessageEvent& QueryEngine::message(std::string_view message_id) const {
  auto it = messages_.find(std::string(message_id));
  if (it == messages_.end())
    throw QueryError(QueryError::Kind::unknown_message,
                     "unknown message '" + std::string(message_id) + "'");
  return *it->second;
}

}  // namespace spotter
