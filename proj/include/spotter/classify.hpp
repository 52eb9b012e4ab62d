#pragma once

#include <string_view>

#include "spotter/trace_model.hpp"

namespace spotter {

/// How much of its time slice an iteration used.
enum class SliceUse { green, orange, red };

/// Boundaries in permille of the slice. An iteration is green up to and
/// including `orange_above`, orange up to and including `red_above`, red
/// beyond.
struct ClassThresholds {
  int orange_above_permille = 750;
  int red_above_permille = 1000;
};

constexpr SliceUse classify_slice_use(DurationMs duration_ms, DurationMs slice_ms,
                                      ClassThresholds t = {}) {
  // integer comparison: duration / slice <= permille / 1000
  if (duration_ms * 1000 <= static_cast<DurationMs>(t.orange_above_permille) * slice_ms)
    return SliceUse::green;
  if (duration_ms * 1000 <= static_cast<DurationMs>(t.red_above_permille) * slice_ms)
    return SliceUse::orange;
  return SliceUse::red;
}

constexpr std::string_view to_string(SliceUse c) {
  switch (c) {
    case SliceUse::green: return "green";
    case SliceUse::orange: return "orange";
    case SliceUse::red: return "red";
  }
  return "?";
}

}  // namespace spotter
