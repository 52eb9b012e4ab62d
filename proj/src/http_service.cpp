#include "spotter/http_service.hpp"

#include <system_error>

#include "httplib.h"
#include "spotter/exports.hpp"
#include "spotter/snapshot_store.hpp"

namespace spotter {

namespace {

constexpr const char* kJson = "application/json";

struct FileStamp {
  std::filesystem::file_time_type mtime;
  std::uintmax_t size = 0;
  bool operator==(const FileStamp&) const = default;
};

std::optional<FileStamp> stamp_of(const std::filesystem::path& path) {
  std::error_code ec;
  FileStamp s;
  s.mtime = std::filesystem::last_write_time(path, ec);
  if (ec) return std::nullopt;
  s.size = std::filesystem::file_size(path, ec);
  if (ec) return std::nullopt;
  return s;
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

void error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(canonical_dump(Json{{"error", message}}) + "\n", kJson);
}

}  // namespace

struct HttpService::Impl {
  std::filesystem::path path;
  std::optional<FileStamp> loaded;
  httplib::Server server;
};

HttpService::HttpService(std::filesystem::path snapshot_path,
                         std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->path = std::move(snapshot_path);
  impl_->loaded = stamp_of(impl_->path);
  engine_ = std::make_shared<QueryEngine>(
      std::make_shared<const Snapshot>(read_snapshot(impl_->path)));

  auto& srv = impl_->server;
  auto engine = engine_;
  Impl* impl = impl_.get();

  if (ui_dir) srv.set_mount_point("/", ui_dir->string());

  // Every API route goes through here: the staleness check first, then the
  // handler, with query errors mapped to status codes.
  auto route = [impl, engine](auto handler) {
    return [impl, engine, handler](const httplib::Request& req, httplib::Response& res) {
      if (stamp_of(impl->path) != impl->loaded) {
        error(res, 410, "snapshot file changed since it was loaded");
        return;
      }
      try {
        res.set_content(handler(*engine, req), kJson);
      } catch (const InvalidViewport& e) {
        error(res, 400, e.what());
      } catch (const QueryError& e) {
        error(res, e.kind() == QueryError::Kind::unknown_message ? 404 : 400, e.what());
      }
    };
  };

  srv.Get("/api/session", route([](const QueryEngine& q, const httplib::Request&) {
            return session_body(q.snapshot().session);
          }));
  srv.Get("/api/flat-profile", route([](const QueryEngine& q, const httplib::Request&) {
            return profile_body(q.profile());
          }));
  srv.Get("/api/global-stats", route([](const QueryEngine& q, const httplib::Request&) {
            return stats_body(q.stats());
          }));
  srv.Get("/api/scene", route([](const QueryEngine& q, const httplib::Request& req) {
            ViewportParams p{param(req, "t0"),     param(req, "t1"),    param(req, "px_per_ms"),
                             param(req, "hidden"), param(req, "order"), param(req, "buckets")};
            return scene_body(q.snapshot(), q.profile(), parse_viewport(q.snapshot().session, p));
          }));
  srv.Get("/api/cpu", route([](const QueryEngine& q, const httplib::Request& req) {
            DurationMs bucket = kDefaultCpuBucketMs;
            if (auto s = param(req, "bucket_ms")) {
              try {
                std::size_t used = 0;
                bucket = std::stoll(*s, &used);
                if (used != s->size()) throw std::invalid_argument("trailing");
              } catch (const std::logic_error&) {
                throw QueryError(QueryError::Kind::invalid_bucket, "bucket_ms must be an integer");
              }
            }
            return cpu_body(q.snapshot(), bucket);
          }));
  srv.Get(R"(/api/message/(.+))", route([](const QueryEngine& q, const httplib::Request& req) {
            return message_body(q.message(req.matches[1].str()));
          }));
  srv.Get("/api/birds-eye", route([](const QueryEngine& q, const httplib::Request& req) {
            std::size_t buckets = Viewport{}.birds_eye_buckets;
            if (auto s = param(req, "buckets")) {
              ViewportParams p;
              p.buckets = s;
              buckets = parse_viewport(q.snapshot().session, p).birds_eye_buckets;
            }
            return birds_eye_body(q.snapshot(), q.profile(), buckets);
          }));

  if (!ui_dir) {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("spotter: no UI directory configured; the API lives under /api/\n",
                      "text/plain");
    });
  }
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace spotter
