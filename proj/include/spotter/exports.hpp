#pragma once

// Response bodies shared by the CLI exports and the HTTP API. Both call
// these, so a body is byte-identical whichever way it was requested. Every
// body is one canonical JSON document followed by a newline.

#include <optional>
#include <string>
#include <string_view>

#include "spotter/query_engine.hpp"
#include "spotter/scene.hpp"
#include "spotter/serialize.hpp"

namespace spotter {

Json json_of(const FlatProfile& profile);
Json json_of(const GlobalStats& stats);
Json json_of(const std::vector<CpuBucket>& series, DurationMs bucket_ms);

std::string session_body(const SessionInfo& session);
std::string profile_body(const FlatProfile& profile);
std::string stats_body(const GlobalStats& stats);
std::string cpu_body(const Snapshot& snapshot, DurationMs bucket_ms);
std::string message_body(const MessageEvent& message);
std::string birds_eye_body(const Snapshot& snapshot, const FlatProfile& profile,
                           std::size_t buckets);
std::string scene_body(const Snapshot& snapshot, const FlatProfile& profile,
                       const Viewport& viewport);

/// Raw, unparsed viewport parameters as they arrive from flags or a query
/// string. Missing t0/t1 mean the session bounds.
struct ViewportParams {
  std::optional<std::string> t0, t1, px_per_ms, hidden, order, buckets;
};

/// Throws InvalidViewport on anything unparsable; the range itself is
/// checked by compile_scene().
Viewport parse_viewport(const SessionInfo& session, const ViewportParams& params);

/// Comma-separated list, empty items dropped.
std::vector<std::string> split_list(std::string_view s);

inline constexpr double kDefaultPxPerMs = 0.1;
inline constexpr DurationMs kDefaultCpuBucketMs = 1000;

}  // namespace spotter
