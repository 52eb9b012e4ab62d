#pragma once

// Read-only HTTP API over one loaded snapshot.
//
//   GET /api/session
//   GET /api/flat-profile
//   GET /api/global-stats
//   GET /api/scene?t0&t1&px_per_ms&hidden&order&buckets
//   GET /api/cpu?bucket_ms
//   GET /api/message/{id}
//   GET /api/birds-eye?buckets
//   GET /            static UI assets, when a UI directory is given
//
// Bodies come from exports.hpp. 400 for bad parameters, 404 for an unknown
// message, 410 once the snapshot file on disk no longer matches what was
// loaded.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "spotter/query_engine.hpp"

namespace spotter {

class HttpService {
 public:
  /// Loads the snapshot; throws SnapshotError like read_snapshot().
  explicit HttpService(std::filesystem::path snapshot_path,
                       std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to `host`; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

  const QueryEngine& engine() const { return *engine_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<QueryEngine> engine_;
};

}  // namespace spotter
