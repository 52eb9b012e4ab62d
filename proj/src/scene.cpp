#include "spotter/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "spotter/profile_table.hpp"

namespace spotter {

namespace {

constexpr double kMinTickSpacingPx = 80.0;
constexpr std::size_t kMaxBirdsEyeBuckets = 100000;

DurationMs tick_step(double px_per_ms) {
  for (DurationMs decade = 1;; decade *= 10)
    for (DurationMs m : {1, 2, 5})
      if (static_cast<double>(m * decade) * px_per_ms >= kMinTickSpacingPx ||
          decade >= 1'000'000'000'000)
        return m * decade;
}

std::string_view icon_for(const SimpleEvent& e) {
  if (e.kind == "message_received") return "envelope";
  if (e.kind == "task_refused") return "refusal";
  return "generic";
}

BucketClass bucket_class(SliceUse u) {
  switch (u) {
    case SliceUse::green: return BucketClass::green;
    case SliceUse::orange: return BucketClass::orange;
    case SliceUse::red: return BucketClass::red;
  }
  return BucketClass::empty;
}

void validate(const Snapshot& snapshot, const Viewport& v) {
  const DurationMs duration = snapshot.session.duration_ms;
  if (v.t0 < 0 || v.t1 > duration || v.t0 >= v.t1)
    throw InvalidViewport("viewport [" + std::to_string(v.t0) + ", " + std::to_string(v.t1) +
                          ") must satisfy 0 <= t0 < t1 <= " + std::to_string(duration));
  if (!(v.px_per_ms > 0) || !std::isfinite(v.px_per_ms))
    throw InvalidViewport("px_per_ms must be a positive number");
  if (v.birds_eye_buckets < 1 || v.birds_eye_buckets > kMaxBirdsEyeBuckets)
    throw InvalidViewport("birds-eye bucket count must be in [1, " +
                          std::to_string(kMaxBirdsEyeBuckets) + "]");
}

Json json_of(const ArcEnd& end) {
  Json j = Json::object();
  if (end.lane)
    j["lane"] = *end.lane;
  else
    j["external"] = *end.external;
  j["y_index"] = end.y_index;
  return j;
}

}  // namespace

std::size_t BirdsEye::bucket_of(TimestampMs t) const {
  if (bounds.size() < 2) return 0;
  auto it = std::upper_bound(bounds.begin(), bounds.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - bounds.begin() - 1));
  return std::min(idx, bounds.size() - 2);
}

Viewport full_viewport(const SessionInfo& session, double px_per_ms) {
  Viewport v;
  v.t0 = 0;
  v.t1 = session.duration_ms;
  v.px_per_ms = px_per_ms;
  return v;
}

SliceUse classify_rect(DurationMs duration_ms, DurationMs slice_ms) {
  return classify_slice_use(duration_ms, slice_ms);
}

double cpu_hue(double load_pct) {
  return 120.0 * (1.0 - std::clamp(load_pct, 0.0, 100.0) / 100.0);
}

std::string cpu_color(double load_pct) {
  // HSV with S = V = 1; only the red and green channels move on this arc
  const double h = cpu_hue(load_pct);
  const double r = h <= 60 ? 1.0 : (120 - h) / 60;
  const double g = h >= 60 ? 1.0 : h / 60;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x00", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(g * 255)));
  return buf;
}

BirdsEye birds_eye(const Snapshot& snapshot, std::size_t width_buckets,
                   const std::vector<std::string>& lane_agents) {
  if (width_buckets < 1 || width_buckets > kMaxBirdsEyeBuckets)
    throw InvalidViewport("birds-eye bucket count must be in [1, " +
                          std::to_string(kMaxBirdsEyeBuckets) + "]");
  BirdsEye be;
  be.duration_ms = snapshot.session.duration_ms;
  const auto w = static_cast<std::int64_t>(width_buckets);
  be.bounds.resize(width_buckets + 1);
  for (std::int64_t i = 0; i <= w; ++i)
    be.bounds[static_cast<std::size_t>(i)] = i * be.duration_ms / w;

  std::unordered_map<std::string, std::size_t> lane_of;
  for (const auto& id : lane_agents) {
    lane_of.emplace(id, be.lanes.size());
    be.lanes.push_back(BirdsEyeLane{id, std::vector<BucketClass>(width_buckets, BucketClass::empty)});
  }

  for (const auto& record : snapshot.events) {
    const auto* it = std::get_if<IterationEvent>(&record.event);
    if (!it || it->duration_ms <= 0) continue;
    auto lane = lane_of.find(it->agent_id);
    if (lane == lane_of.end()) continue;
    const BucketClass cls =
        bucket_class(classify_slice_use(it->duration_ms, snapshot.session.slice_ms));
    auto& strip = be.lanes[lane->second].buckets;
    const std::size_t last = be.bucket_of(it->end() - 1);
    for (std::size_t b = be.bucket_of(it->start); b <= last; ++b) {
      if (be.bounds[b] >= be.bounds[b + 1]) continue;  // zero-width bucket
      strip[b] = std::max(strip[b], cls);
    }
  }
  return be;
}

BirdsEye birds_eye(const Snapshot& snapshot, std::size_t width_buckets) {
  std::vector<std::string> order;
  for (const auto& row : flat_profile(snapshot).rows) order.push_back(row.agent_id);
  return birds_eye(snapshot, width_buckets, order);
}

SceneDescription compile_scene(const Snapshot& snapshot, const Viewport& viewport) {
  return compile_scene(snapshot, flat_profile(snapshot), viewport);
}

SceneDescription compile_scene(const Snapshot& snapshot, const FlatProfile& profile,
                               const Viewport& viewport) {
  validate(snapshot, viewport);
  SceneDescription scene;
  scene.viewport = viewport;
  const double px = viewport.px_per_ms;
  auto x_of = [&](TimestampMs t) { return static_cast<double>(t - viewport.t0) * px; };

  // --- lanes ---
  std::unordered_map<std::string, const FlatProfileRow*> rows;
  DurationMs max_activity = 0;
  for (const auto& row : profile.rows) {
    rows.emplace(row.agent_id, &row);
    max_activity = std::max(max_activity, row.activity_ms);
  }
  for (const auto& id : viewport.hidden)
    if (!rows.contains(id)) throw InvalidViewport("hidden agent '" + id + "' is unknown");

  std::vector<const FlatProfileRow*> order;
  std::set<std::string> placed;
  for (const auto& id : viewport.lane_order) {
    auto r = rows.find(id);
    if (r == rows.end()) throw InvalidViewport("lane order names unknown agent '" + id + "'");
    if (!placed.insert(id).second) throw InvalidViewport("lane order repeats '" + id + "'");
    order.push_back(r->second);
  }
  for (const auto& row : profile.rows)
    if (!placed.contains(row.agent_id)) order.push_back(&row);

  std::unordered_map<std::string, std::size_t> lane_of;
  for (const auto* row : order) {
    if (viewport.hidden.contains(row->agent_id)) continue;
    Lane lane;
    lane.agent_id = row->agent_id;
    lane.caption = row->name.empty() ? row->agent_id : row->name;
    lane.darkness = max_activity > 0 ? static_cast<double>(row->activity_ms) /
                                           static_cast<double>(max_activity)
                                     : 0.0;
    lane.y_index = scene.lanes.size();
    lane.t_begin = 0;
    lane.t_end = snapshot.session.duration_ms;
    lane_of.emplace(lane.agent_id, lane.y_index);
    scene.lanes.push_back(std::move(lane));
  }

  // life spans and external platforms need the whole log, not just the view
  std::set<std::string> seen_created;
  std::set<std::string> platforms;
  std::set<std::string> known_agents;
  for (const auto& a : snapshot.agents) known_agents.insert(a.agent_id);
  for (const auto& record : snapshot.events) {
    if (const auto* l = std::get_if<LifecycleEvent>(&record.event)) {
      auto lane = lane_of.find(l->agent_id);
      if (lane == lane_of.end()) continue;
      if (l->kind == LifecycleKind::created && seen_created.insert(l->agent_id).second)
        scene.lanes[lane->second].t_begin = l->at;
      if (l->kind == LifecycleKind::destroyed) scene.lanes[lane->second].t_end = l->at;
    } else if (const auto* m = std::get_if<MessageEvent>(&record.event)) {
      for (const Endpoint* e : {&m->sender, &m->receiver})
        if (e->is_external || !known_agents.contains(e->agent_id)) platforms.insert(e->platform_id);
    }
  }
  for (auto& lane : scene.lanes) {
    lane.x_begin = x_of(lane.t_begin);
    lane.x_end = x_of(lane.t_end);
  }
  for (const auto& p : platforms)
    scene.external_lines.push_back(ExternalLine{p, scene.lanes.size() + scene.external_lines.size()});
  std::map<std::string, std::size_t> external_y;
  for (const auto& line : scene.external_lines) external_y.emplace(line.platform_id, line.y_index);

  // --- time axis ---
  scene.time_axis.step_ms = tick_step(px);
  const DurationMs step = scene.time_axis.step_ms;
  for (TimestampMs t = (viewport.t0 + step - 1) / step * step; t <= viewport.t1; t += step)
    scene.time_axis.ticks.push_back(Tick{t, x_of(t), format_duration(t)});

  // --- cpu strip ---
  TimestampMs prev = 0;
  for (const auto& record : snapshot.events) {
    const auto* s = std::get_if<CpuSample>(&record.event);
    if (!s) continue;
    if (prev < viewport.t1 && s->at > viewport.t0)
      scene.cpu_strip.push_back(CpuSegment{prev, s->at, x_of(prev), x_of(s->at), s->load_centipct,
                                           cpu_color(s->load_pct())});
    prev = s->at;
  }

  // --- culled primitives ---
  auto end_for = [&](const Endpoint& e) -> std::optional<ArcEnd> {
    if (!e.is_external && known_agents.contains(e.agent_id)) {
      auto lane = lane_of.find(e.agent_id);
      if (lane == lane_of.end()) return std::nullopt;  // hidden
      return ArcEnd{lane->second, std::nullopt, lane->second};
    }
    return ArcEnd{std::nullopt, e.platform_id, external_y.at(e.platform_id)};
  };

  for (const auto& hit : events_in_range(snapshot, viewport.t0, viewport.t1)) {
    const EventRecord& record = *hit.record;
    if (const auto* it = std::get_if<IterationEvent>(&record.event)) {
      if (it->duration_ms <= 0) continue;
      auto lane = lane_of.find(it->agent_id);
      if (lane == lane_of.end()) continue;
      const double x0 = x_of(it->start);
      const double width = std::max(static_cast<double>(it->duration_ms) * px, kMinRectWidthPx);
      scene.rects.push_back(Rect{lane->second, record.seq, it->start, it->end(), x0, x0 + width, width,
                                 classify_rect(it->duration_ms, snapshot.session.slice_ms)});
    } else if (const auto* s = std::get_if<SimpleEvent>(&record.event)) {
      auto lane = lane_of.find(s->agent_id);
      if (lane == lane_of.end()) continue;
      scene.glyphs.push_back(
          Glyph{lane->second, record.seq, s->at, x_of(s->at), std::string(icon_for(*s)), s->kind});
    } else if (const auto* l = std::get_if<LifecycleEvent>(&record.event)) {
      auto lane = lane_of.find(l->agent_id);
      if (lane == lane_of.end()) continue;
      const std::string kind(to_string(l->kind));
      scene.glyphs.push_back(Glyph{lane->second, record.seq, l->at, x_of(l->at), kind, kind});
    } else if (const auto* m = std::get_if<MessageEvent>(&record.event)) {
      auto from = end_for(m->sender);
      auto to = end_for(m->receiver);
      if (!from || !to) continue;
      Arc arc;
      arc.message_id = m->message_id;
      arc.event_ref = record.seq;
      arc.from = *from;
      arc.to = *to;
      arc.t_send = m->sent_at;
      arc.x_send = x_of(m->sent_at);
      arc.t_receive = m->received_at;
      if (m->received_at) arc.x_receive = x_of(*m->received_at);
      arc.pending = !m->received_at;
      arc.direction = to->y_index > from->y_index   ? "down"
                      : to->y_index < from->y_index ? "up"
                                                    : "same";
      scene.arcs.push_back(std::move(arc));
    }
  }

  // --- overview ---
  std::vector<std::string> lane_ids;
  for (const auto& lane : scene.lanes) lane_ids.push_back(lane.agent_id);
  scene.birds_eye = birds_eye(snapshot, viewport.birds_eye_buckets, lane_ids);
  scene.view_bucket_first = scene.birds_eye.bucket_of(viewport.t0);
  scene.view_bucket_last = scene.birds_eye.bucket_of(viewport.t1 - 1);
  return scene;
}

std::string_view to_string(BucketClass c) {
  switch (c) {
    case BucketClass::empty: return "empty";
    case BucketClass::green: return "green";
    case BucketClass::orange: return "orange";
    case BucketClass::red: return "red";
  }
  return "?";
}

Json json_of(const BirdsEye& be) {
  Json lanes = Json::array();
  for (const auto& lane : be.lanes) {
    std::string strip;
    strip.reserve(lane.buckets.size());
    // one letter per bucket keeps wide strips compact: e/g/o/r
    for (auto b : lane.buckets) strip += to_string(b)[0];
    lanes.push_back(Json{{"agent_id", lane.agent_id}, {"strip", strip}});
  }
  return Json{{"duration_ms", be.duration_ms},
              {"buckets", be.bounds.empty() ? 0 : be.bounds.size() - 1},
              {"bounds", be.bounds},
              {"lanes", std::move(lanes)}};
}

Json json_of(const SceneDescription& scene) {
  const Viewport& v = scene.viewport;
  Json j = Json::object();
  j["viewport"] = Json{{"t0", v.t0},
                       {"t1", v.t1},
                       {"px_per_ms", v.px_per_ms},
                       {"width_px", static_cast<double>(v.t1 - v.t0) * v.px_per_ms}};
  j["z_order"] = Json::array({"lanes", "rects", "glyphs", "arcs"});

  Json ticks = Json::array();
  for (const auto& t : scene.time_axis.ticks)
    ticks.push_back(Json{{"t", t.t}, {"x", t.x}, {"label", t.label}});
  j["time_axis"] = Json{{"step_ms", scene.time_axis.step_ms}, {"ticks", std::move(ticks)}};

  Json cpu = Json::array();
  for (const auto& s : scene.cpu_strip)
    cpu.push_back(Json{{"t0", s.t0},
                       {"t1", s.t1},
                       {"x0", s.x0},
                       {"x1", s.x1},
                       {"load_centipct", s.load_centipct},
                       {"color", s.color}});
  j["cpu_strip"] = std::move(cpu);

  Json lanes = Json::array();
  for (const auto& l : scene.lanes)
    lanes.push_back(Json{{"agent_id", l.agent_id},
                         {"caption", l.caption},
                         {"darkness", l.darkness},
                         {"y_index", l.y_index},
                         {"t_begin", l.t_begin},
                         {"t_end", l.t_end},
                         {"x_begin", l.x_begin},
                         {"x_end", l.x_end}});
  j["lanes"] = std::move(lanes);

  Json ext = Json::array();
  for (const auto& e : scene.external_lines)
    ext.push_back(Json{{"platform_id", e.platform_id}, {"y_index", e.y_index}});
  j["external_lines"] = std::move(ext);

  Json rects = Json::array();
  for (const auto& r : scene.rects)
    rects.push_back(Json{{"lane", r.lane},
                         {"event_ref", r.event_ref},
                         {"t_start", r.t_start},
                         {"t_end", r.t_end},
                         {"x0", r.x0},
                         {"x1", r.x1},
                         {"width", r.width},
                         {"color", to_string(r.color)}});
  j["rects"] = std::move(rects);

  Json glyphs = Json::array();
  for (const auto& g : scene.glyphs)
    glyphs.push_back(Json{{"lane", g.lane},
                          {"event_ref", g.event_ref},
                          {"t", g.t},
                          {"x", g.x},
                          {"icon_kind", g.icon_kind},
                          {"kind", g.kind}});
  j["glyphs"] = std::move(glyphs);

  Json arcs = Json::array();
  for (const auto& a : scene.arcs) {
    Json arc = Json{{"message_id", a.message_id},
                    {"event_ref", a.event_ref},
                    {"from", json_of(a.from)},
                    {"to", json_of(a.to)},
                    {"t_send", a.t_send},
                    {"x_send", a.x_send}};
    arc["t_receive"] = a.t_receive ? Json(*a.t_receive) : Json(nullptr);
    arc["x_receive"] = a.x_receive ? Json(*a.x_receive) : Json(nullptr);
    arc["pending"] = a.pending;
    arc["direction"] = a.direction;
    arcs.push_back(std::move(arc));
  }
  j["arcs"] = std::move(arcs);

  j["birds_eye"] = json_of(scene.birds_eye);
  j["view_buckets"] = Json::array({scene.view_bucket_first, scene.view_bucket_last});
  return j;
}

}  // namespace spotter
