#pragma once

// The `spotter` command. Each subcommand is also callable directly so tests
// can run it in-process against string streams.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "spotter/exports.hpp"

namespace spotter::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kBadScenario = 2,
  kIoFailure = 3,
  kCorruptSnapshot = 4,
  kInvalidViewport = 5,
};

struct RecordOptions {
  std::optional<std::filesystem::path> scenario;  // default scenario when unset
  std::filesystem::path out;
  bool realtime = false;
};

enum class Format { text, canonical };

struct QueryOptions {
  std::string what;  // session, global-stats, cpu, message, birds-eye
  std::optional<std::string> message_id;
  DurationMs bucket_ms = kDefaultCpuBucketMs;
  std::size_t buckets = 256;
};

struct ServeOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> ui_dir;
};

int cmd_record(const RecordOptions& opts, std::ostream& out, std::ostream& err);
int cmd_profile(const std::filesystem::path& snapshot, Format format, std::ostream& out,
                std::ostream& err);
/// `out_path` of "-" or empty writes to `out`.
int cmd_export_scene(const std::filesystem::path& snapshot, const ViewportParams& params,
                     const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);
int cmd_query(const std::filesystem::path& snapshot, const QueryOptions& opts, std::ostream& out,
              std::ostream& err);
/// Blocks until the server stops.
int cmd_serve(const std::filesystem::path& snapshot, const ServeOptions& opts, std::ostream& out,
              std::ostream& err);

/// Parses argv and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spotter::cli
