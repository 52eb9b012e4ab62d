#pragma once

#include <string>

#include "spotter/query_engine.hpp"

namespace spotter {

/// "m:ss.mmm" from one minute up, "s.mmm" below.
std::string format_duration(DurationMs ms);

/// Hundredths of a percent as "12.34".
std::string format_percent(std::int64_t centi);

/// Aligned text rendering: session header block, a blank line, then the
/// two-line column header and one line per agent. Locale independent.
std::string render_flat_profile(const FlatProfile& profile);

}  // namespace spotter
