#include "spotter/profile_table.hpp"

#include <cstdio>
#include <cstdlib>

namespace spotter {

namespace {

// Agent column is left aligned; the rest are right aligned.
constexpr int kAgentWidth = 12;
constexpr int kWidths[] = {11, 10, 10, 11, 8, 12, 6, 6};

std::string right(const std::string& s, int width) {
  if (static_cast<int>(s.size()) >= width) return " " + s;
  return std::string(static_cast<std::size_t>(width) - s.size(), ' ') + s;
}

std::string left(const std::string& s, int width) {
  // every right-aligned cell starts with a space, so an overlong name needs
  // no separator of its own
  if (static_cast<int>(s.size()) >= width) return s;
  return s + std::string(static_cast<std::size_t>(width) - s.size(), ' ');
}

std::string header_line(const char* label, const std::string& value) {
  return left(label, 21) + value + "\n";
}

}  // namespace

std::string format_duration(DurationMs ms) {
  const bool negative = ms < 0;
  const auto v = static_cast<unsigned long long>(std::llabs(ms));
  char buf[48];
  if (v >= 60000) {
    std::snprintf(buf, sizeof buf, "%s%llu:%02llu.%03llu", negative ? "-" : "", v / 60000,
                  (v / 1000) % 60, v % 1000);
  } else {
    std::snprintf(buf, sizeof buf, "%s%llu.%03llu", negative ? "-" : "", v / 1000, v % 1000);
  }
  return buf;
}

std::string format_percent(std::int64_t centi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(centi / 100),
                static_cast<long long>(centi % 100));
  return buf;
}

std::string render_flat_profile(const FlatProfile& profile) {
  const auto& h = profile.header;
  std::string out;
  out += header_line("Total Session Time", format_duration(h.total_duration_ms));
  out += header_line("Total Activity", format_duration(h.total_activity_ms));
  out += header_line("Messages Sent", std::to_string(h.messages_sent));
  out += header_line("Messages Received", std::to_string(h.messages_received));
  out += header_line("Time Slice Duration", std::to_string(h.slice_ms) + " ms");
  out += "\n";

  const char* top[] = {"T>0", "T>100%", "Activity", "% Session", "Max(T)", "Average(T)",
                       "Msg.", "Msg."};
  const char* sub[] = {"iterations", "overload", "mm:ss.ms", "activity", "ss.ms", "ss.ms",
                       "sent", "rec."};
  out += left("Agent", kAgentWidth);
  for (int i = 0; i < 8; ++i) out += right(top[i], kWidths[i]);
  out += "\n";
  out += left("", kAgentWidth);
  for (int i = 0; i < 8; ++i) out += right(sub[i], kWidths[i]);
  out += "\n";

  for (const auto& row : profile.rows) {
    const std::string cells[] = {std::to_string(row.iterations_nonzero),
                                 std::to_string(row.overload_count),
                                 format_duration(row.activity_ms),
                                 format_percent(row.pct_centi),
                                 format_duration(row.max_ms),
                                 format_duration(row.avg_ms),
                                 std::to_string(row.msgs_sent),
                                 std::to_string(row.msgs_received)};
    out += left(row.name, kAgentWidth);
    for (int i = 0; i < 8; ++i) out += right(cells[i], kWidths[i]);
    out += "\n";
  }
  return out;
}

}  // namespace spotter
