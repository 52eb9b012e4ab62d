#include "spotter/exports.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace spotter {

namespace {

std::string body(const Json& j) { return canonical_dump(j) + "\n"; }

std::int64_t parse_int(const std::string& name, const std::string& s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw InvalidViewport(name + " must be an integer, got '" + s + "'");
  return v;
}

}  // namespace

Json json_of(const FlatProfile& profile) {
  const auto& h = profile.header;
  Json rows = Json::array();
  for (const auto& r : profile.rows) {
    Json row{{"agent_id", r.agent_id},
             {"name", r.name},
             {"iterations_nonzero", r.iterations_nonzero},
             {"overload_count", r.overload_count},
             {"activity_ms", r.activity_ms},
             {"pct_centi", r.pct_centi},
             {"pct_session", r.pct_session()},
             {"max_ms", r.max_ms},
             {"avg_ms", r.avg_ms},
             {"msgs_sent", r.msgs_sent},
             {"msgs_received", r.msgs_received}};
    if (r.breakdown_ms)
      row["breakdown_ms"] = Json{{"perception", r.breakdown_ms->perception_ms},
                                 {"reasoning", r.breakdown_ms->reasoning_ms},
                                 {"action", r.breakdown_ms->action_ms}};
    rows.push_back(std::move(row));
  }
  return Json{{"header",
               {{"total_duration_ms", h.total_duration_ms},
                {"total_activity_ms", h.total_activity_ms},
                {"messages_sent", h.messages_sent},
                {"messages_received", h.messages_received},
                {"slice_ms", h.slice_ms}}},
              {"rows", std::move(rows)}};
}

Json json_of(const GlobalStats& s) {
  return Json{{"total_duration_ms", s.total_duration_ms},
              {"total_activity_ms", s.total_activity_ms},
              {"total_messages", s.total_messages},
              {"avg_active_agents_per_sec", s.avg_active_agents_per_sec}};
}

Json json_of(const std::vector<CpuBucket>& series, DurationMs bucket_ms) {
  Json buckets = Json::array();
  for (const auto& b : series)
    buckets.push_back(Json{{"bucket_start", b.bucket_start},
                           {"mean_load_pct", b.mean_load_pct},
                           {"max_load_pct", b.max_load_pct},
                           {"samples", b.samples},
                           {"empty", b.empty}});
  return Json{{"bucket_ms", bucket_ms}, {"buckets", std::move(buckets)}};
}

std::string session_body(const SessionInfo& session) { return body(json_of(session)); }
std::string profile_body(const FlatProfile& profile) { return body(json_of(profile)); }
std::string stats_body(const GlobalStats& stats) { return body(json_of(stats)); }

std::string cpu_body(const Snapshot& snapshot, DurationMs bucket_ms) {
  return body(json_of(cpu_series(snapshot, bucket_ms), bucket_ms));
}

std::string message_body(const MessageEvent& message) { return body(json_of(message)); }

std::string birds_eye_body(const Snapshot& snapshot, const FlatProfile& profile,
                           std::size_t buckets) {
  std::vector<std::string> order;
  for (const auto& row : profile.rows) order.push_back(row.agent_id);
  return body(json_of(birds_eye(snapshot, buckets, order)));
}

std::string scene_body(const Snapshot& snapshot, const FlatProfile& profile,
                       const Viewport& viewport) {
  return body(json_of(compile_scene(snapshot, profile, viewport)));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    auto item = s.substr(0, comma);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

Viewport parse_viewport(const SessionInfo& session, const ViewportParams& p) {
  Viewport v = full_viewport(session, kDefaultPxPerMs);
  if (p.t0) v.t0 = parse_int("t0", *p.t0);
  if (p.t1) v.t1 = parse_int("t1", *p.t1);
  if (p.px_per_ms) {
    const std::string& s = *p.px_per_ms;
    char* end = nullptr;
    v.px_per_ms = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
      throw InvalidViewport("px_per_ms must be a number, got '" + s + "'");
  }
  if (p.hidden) {
    auto ids = split_list(*p.hidden);
    v.hidden.insert(ids.begin(), ids.end());
  }
  if (p.order) v.lane_order = split_list(*p.order);
  if (p.buckets) {
    const auto n = parse_int("buckets", *p.buckets);
    if (n < 1) throw InvalidViewport("buckets must be at least 1");
    v.birds_eye_buckets = static_cast<std::size_t>(n);
  }
  return v;
}

}  // namespace spotter
