#pragma once

// Space-time diagram as plain data. compile_scene() turns a snapshot and a
// viewport into primitives in pixel space; drawing them is up to the
// consumer. Renderers stack them lanes < rects < glyphs < arcs.
//
// x coordinates are (t - viewport.t0) * px_per_ms and are not clipped, so a
// rect that starts before t0 has a negative x0.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/classify.hpp"
#include "spotter/query_engine.hpp"
#include "spotter/serialize.hpp"

namespace spotter {

class InvalidViewport : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Viewport {
  TimestampMs t0 = 0;
  TimestampMs t1 = 0;
  double px_per_ms = 0.1;
  /// Explicit lane order by agent id. Agents not listed follow in profile
  /// order. Empty means auto.
  std::vector<std::string> lane_order;
  std::set<std::string> hidden;
  std::size_t birds_eye_buckets = 256;
};

/// Whole-session viewport at the given scale.
Viewport full_viewport(const SessionInfo& session, double px_per_ms = 0.1);

inline constexpr double kMinRectWidthPx = 1.0;

struct Tick {
  TimestampMs t = 0;
  double x = 0;
  std::string label;
};

struct TimeAxis {
  DurationMs step_ms = 0;
  std::vector<Tick> ticks;
};

struct CpuSegment {
  TimestampMs t0 = 0, t1 = 0;
  double x0 = 0, x1 = 0;
  std::int32_t load_centipct = 0;
  std::string color;
};

struct Lane {
  std::string agent_id;
  std::string caption;
  double darkness = 0;
  std::size_t y_index = 0;
  // life span: created .. destroyed (or session end)
  TimestampMs t_begin = 0, t_end = 0;
  double x_begin = 0, x_end = 0;
};

struct ExternalLine {
  std::string platform_id;
  std::size_t y_index = 0;
};

struct Rect {
  std::size_t lane = 0;
  Sequence event_ref = 0;
  TimestampMs t_start = 0, t_end = 0;
  double x0 = 0, x1 = 0;
  /// duration * px_per_ms, raised to kMinRectWidthPx; x1 = x0 + width.
  double width = 0;
  SliceUse color = SliceUse::green;
};

struct Glyph {
  std::size_t lane = 0;
  Sequence event_ref = 0;
  TimestampMs t = 0;
  double x = 0;
  std::string icon_kind;  // envelope, refusal, created, ..., generic
  std::string kind;       // raw event kind
};

/// One end of an arc: a lane index, or an external platform's line.
struct ArcEnd {
  std::optional<std::size_t> lane;
  std::optional<std::string> external;
  std::size_t y_index = 0;
  bool operator==(const ArcEnd&) const = default;
};

struct Arc {
  std::string message_id;
  Sequence event_ref = 0;
  ArcEnd from, to;
  TimestampMs t_send = 0;
  std::optional<TimestampMs> t_receive;
  double x_send = 0;
  std::optional<double> x_receive;
  bool pending = false;
  /// "down" when the receiver sits below the sender, else "up" ("same" for
  /// a message to the sender's own line).
  std::string direction;
};

enum class BucketClass { empty, green, orange, red };

struct BirdsEyeLane {
  std::string agent_id;
  std::vector<BucketClass> buckets;
};

struct BirdsEye {
  DurationMs duration_ms = 0;
  /// buckets + 1 boundaries; bucket i is [bounds[i], bounds[i + 1]).
  std::vector<TimestampMs> bounds;
  std::vector<BirdsEyeLane> lanes;

  std::size_t bucket_of(TimestampMs t) const;
};

struct SceneDescription {
  Viewport viewport;
  TimeAxis time_axis;
  std::vector<CpuSegment> cpu_strip;
  std::vector<Lane> lanes;
  std::vector<ExternalLine> external_lines;
  std::vector<Rect> rects;
  std::vector<Glyph> glyphs;
  std::vector<Arc> arcs;
  BirdsEye birds_eye;
  /// Bucket span [first, last] of the birds-eye strip the viewport covers.
  std::size_t view_bucket_first = 0, view_bucket_last = 0;
};

SliceUse classify_rect(DurationMs duration_ms, DurationMs slice_ms);

/// Hue on the green (120) to red (0) wheel for a load in [0, 100].
double cpu_hue(double load_pct);
/// "#rrggbb" at full saturation and value.
std::string cpu_color(double load_pct);

/// Lanes in flat-profile order.
BirdsEye birds_eye(const Snapshot& snapshot, std::size_t width_buckets);
BirdsEye birds_eye(const Snapshot& snapshot, std::size_t width_buckets,
                   const std::vector<std::string>& lane_agents);

/// Throws InvalidViewport.
SceneDescription compile_scene(const Snapshot& snapshot, const Viewport& viewport);
/// Same, reusing an already computed flat profile.
SceneDescription compile_scene(const Snapshot& snapshot, const FlatProfile& profile,
                               const Viewport& viewport);

std::string_view to_string(BucketClass c);

Json json_of(const SceneDescription& scene);
Json json_of(const BirdsEye& birds_eye);

}  // namespace spotter
