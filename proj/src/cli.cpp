#include "spotter/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "spotter/benchmark_sim.hpp"
#include "spotter/http_service.hpp"
#include "spotter/profile_table.hpp"
#include "spotter/snapshot_store.hpp"

namespace spotter::cli {

namespace {

int snapshot_exit_code(const SnapshotError& e) {
  return e.kind() == SnapshotErrorKind::io_failure ? kIoFailure : kCorruptSnapshot;
}

/// Runs `body`, translating the library's exceptions into exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const bench::ScenarioError& e) {
    err << "error: invalid scenario: " << e.what() << "\n";
    return kBadScenario;
  } catch (const SnapshotError& e) {
    err << "error: " << e.what() << "\n";
    return snapshot_exit_code(e);
  } catch (const InvalidViewport& e) {
    err << "error: invalid viewport: " << e.what() << "\n";
    return kInvalidViewport;
  } catch (const QueryError& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == QueryError::Kind::empty_snapshot ? kCorruptSnapshot : kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  }
}

int write_body(const std::string& body, const std::filesystem::path& out_path, std::ostream& out,
               std::ostream& err) {
  if (out_path.empty() || out_path == "-") {
    out << body;
    return out ? kOk : kIoFailure;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!(file << body) || !file.flush()) {
    err << "error: cannot write '" << out_path.string() << "'\n";
    return kIoFailure;
  }
  return kOk;
}

HttpService* g_service = nullptr;

extern "C" void stop_on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int cmd_record(const RecordOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bench::ScenarioSpec spec =
        opts.scenario ? bench::load_scenario(*opts.scenario) : bench::default_scenario();
    std::shared_ptr<Clock> clock;
    if (opts.realtime)
      clock = std::make_shared<WallClock>();
    else
      clock = std::make_shared<VirtualClock>(spec.epoch_utc_ms);

    ProfilerSink sink;
    bench::begin_benchmark_session(spec, sink, clock);
    const SnapshotHandle h = bench::run_scenario(spec, sink, opts.out);
    out << "session   " << h.session.session_id << "\n"
        << "duration  " << format_duration(h.session.duration_ms) << "\n"
        << "agents    " << h.agent_count << "\n"
        << "events    " << h.event_count << "\n"
        << "written   " << h.path.string() << "\n";
    for (const auto& w : sink.warnings()) err << "warning: " << w << "\n";
    return kOk;
  });
}

int cmd_profile(const std::filesystem::path& snapshot, Format format, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    // one streaming pass; the seal is checked when the reader hits the end
    SnapshotReader reader(snapshot);
    const FlatProfile profile = flat_profile(reader);
    out << (format == Format::text ? render_flat_profile(profile) : profile_body(profile));
    return kOk;
  });
}

int cmd_export_scene(const std::filesystem::path& snapshot, const ViewportParams& params,
                     const std::filesystem::path& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Snapshot s = read_snapshot(snapshot);
    const Viewport v = parse_viewport(s.session, params);
    return write_body(scene_body(s, flat_profile(s), v), out_path, out, err);
  });
}

int cmd_query(const std::filesystem::path& snapshot, const QueryOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const Snapshot s = read_snapshot(snapshot);
    if (opts.what == "session") {
      out << session_body(s.session);
    } else if (opts.what == "global-stats") {
      out << stats_body(global_stats(s));
    } else if (opts.what == "cpu") {
      out << cpu_body(s, opts.bucket_ms);
    } else if (opts.what == "birds-eye") {
      out << birds_eye_body(s, flat_profile(s), opts.buckets);
    } else if (opts.what == "message") {
      if (!opts.message_id) {
        err << "error: message needs --id\n";
        return static_cast<int>(kUsage);
      }
      out << message_body(message_detail(s, *opts.message_id));
    } else {
      err << "error: unknown query '" << opts.what << "'\n";
      return static_cast<int>(kUsage);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_serve(const std::filesystem::path& snapshot, const ServeOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    HttpService service(snapshot, opts.ui_dir);
    const int port = service.bind(opts.bind, opts.port);
    if (port < 0) {
      err << "error: cannot bind " << opts.bind << ":" << opts.port << "\n";
      return static_cast<int>(kIoFailure);
    }
    out << "serving " << snapshot.string() << " on http://" << opts.bind << ":" << port << "/\n"
        << std::flush;
    g_service = &service;
    std::signal(SIGINT, stop_on_signal);
    std::signal(SIGTERM, stop_on_signal);
    service.listen();
    g_service = nullptr;
    return static_cast<int>(kOk);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Profiler for time-sliced multi-agent platforms", "spotter"};
  app.require_subcommand(1);

  RecordOptions record;
  std::string scenario;
  auto* rec = app.add_subcommand("record", "Run the benchmark scenario and write a snapshot");
  rec->add_option("--scenario", scenario, "Scenario file (default: built-in scenario)");
  rec->add_option("--out", record.out, "Snapshot path")->required();
  rec->add_flag("--realtime", record.realtime, "Run against the wall clock");

  std::string snapshot;
  std::string format = "text";
  auto* prof = app.add_subcommand("profile", "Print the flat profile of a snapshot");
  prof->add_option("snapshot", snapshot)->required();
  prof->add_option("--format", format)->check(CLI::IsMember({"text", "canonical"}));

  ViewportParams vp;
  std::string t0, t1, px, hidden, order, buckets, out_path = "-";
  auto* scene = app.add_subcommand("export-scene", "Compile and write a scene");
  scene->add_option("snapshot", snapshot)->required();
  auto* o_t0 = scene->add_option("--t0", t0, "View start, ms");
  auto* o_t1 = scene->add_option("--t1", t1, "View end, ms");
  auto* o_px = scene->add_option("--px-per-ms", px, "Scale");
  auto* o_hidden = scene->add_option("--hidden", hidden, "Comma-separated agent ids");
  auto* o_order = scene->add_option("--order", order, "Comma-separated agent ids");
  auto* o_buckets = scene->add_option("--buckets", buckets, "Birds-eye bucket count");
  scene->add_option("--out", out_path, "Output path, - for stdout");

  QueryOptions query;
  std::string message_id;
  auto* q = app.add_subcommand("query", "Print one API body for a snapshot");
  q->add_option("snapshot", snapshot)->required();
  q->add_option("what", query.what, "session | global-stats | cpu | message | birds-eye")
      ->required()
      ->check(CLI::IsMember({"session", "global-stats", "cpu", "message", "birds-eye"}));
  auto* o_id = q->add_option("--id", message_id, "Message id");
  q->add_option("--bucket-ms", query.bucket_ms, "CPU bucket width");
  q->add_option("--buckets", query.buckets, "Birds-eye bucket count");

  ServeOptions serve;
  std::string ui_dir;
  auto* srv = app.add_subcommand("serve", "Serve the HTTP API for a snapshot");
  srv->add_option("snapshot", snapshot)->required();
  srv->add_option("--port", serve.port, "Port, 0 for any free one");
  srv->add_option("--bind", serve.bind, "Bind address");
  auto* o_ui = srv->add_option("--ui-dir", ui_dir, "Directory with built UI assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  if (rec->parsed()) {
    if (!scenario.empty()) record.scenario = scenario;
    return cmd_record(record, out, err);
  }
  if (prof->parsed())
    return cmd_profile(snapshot, format == "text" ? Format::text : Format::canonical, out, err);
  if (scene->parsed()) {
    auto set = [](CLI::Option* o, const std::string& v, std::optional<std::string>& dst) {
      if (o->count() > 0) dst = v;
    };
    set(o_t0, t0, vp.t0);
    set(o_t1, t1, vp.t1);
    set(o_px, px, vp.px_per_ms);
    set(o_hidden, hidden, vp.hidden);
    set(o_order, order, vp.order);
    set(o_buckets, buckets, vp.buckets);
    return cmd_export_scene(snapshot, vp, out_path, out, err);
  }
  if (q->parsed()) {
    if (o_id->count() > 0) query.message_id = message_id;
    return cmd_query(snapshot, query, out, err);
  }
  if (srv->parsed()) {
    if (o_ui->count() > 0) serve.ui_dir = ui_dir;
    return cmd_serve(snapshot, serve, out, err);
  }
  return kUsage;
}

}  // namespace spotter::cli
