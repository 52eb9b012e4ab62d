// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Runs without the UI and without network access.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spotter/benchmark_sim.hpp"
#include "spotter/cli.hpp"
#include "spotter/clock.hpp"
#include "spotter/profile_table.hpp"
#include "spotter/query_engine.hpp"
#include "spotter/scene.hpp"
#include "spotter/snapshot_store.hpp"
#include "support/fixtures.hpp"

using namespace spotter;
namespace fs = std::filesystem;
using Steady = std::chrono::steady_clock;

namespace {

double seconds_since(Steady::time_point t) {
  return std::chrono::duration<double>(Steady::now() - t).count();
}

/// Collects the first few failures of one criterion.
struct Verdict {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / "spotter-acceptance";
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// --- reference table ------------------------------------------------------

void reference_table(Verdict& v, const fs::path& dir) {
  using testing::kReferenceProfile;
  using testing::parse_clock_ms;

  // identities of the literal table itself
  std::int64_t activity = 0, sent = 0, received = 0;
  for (const auto& r : kReferenceProfile) {
    activity += parse_clock_ms(r.activity);
    sent += r.sent;
    received += r.received;
  }
  v.expect(activity == parse_clock_ms(testing::kReferenceTotalActivity) && activity == 629164,
           "table activity sums to " + std::to_string(activity));
  v.expect(sent == 1206 && received == 1206, "table message totals differ from 1206");

  // the synthesized multisets must honour every row
  for (const auto& r : kReferenceProfile) {
    const auto its = testing::reference_iterations(r, 1000);
    std::int64_t sum = 0, max = 0, over = 0;
    for (auto d : its) {
      sum += d;
      max = std::max(max, d);
      over += d > 1000;
    }
    v.expect(static_cast<std::int64_t>(its.size()) == r.iterations && sum == parse_clock_ms(r.activity) &&
                 max == parse_clock_ms(r.max) && over == r.overloads,
             std::string("iteration multiset for ") + r.agent);
  }

  const auto path = dir / "reference.aspot";
  write_snapshot(path, testing::reference_snapshot());
  std::ostringstream out, err;
  const int code = cli::cmd_profile(path, cli::Format::text, out, err);
  v.expect(code == 0, "cmd_profile exit " + std::to_string(code) + ": " + err.str());

  std::istringstream text(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(text, l);) lines.push_back(l);
  auto header = [&](const std::string& label) -> std::string {
    for (const auto& l : lines)
      if (l.rfind(label, 0) == 0) return split_ws(l.substr(label.size())).at(0);
    return "";
  };
  v.expect(header("Total Session Time") == testing::kReferenceSessionTime, "session time");
  v.expect(header("Total Activity") == testing::kReferenceTotalActivity, "total activity");
  v.expect(header("Messages Sent") == "1206", "messages sent");
  v.expect(header("Messages Received") == "1206", "messages received");

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (i >= 8 && !lines[i].empty()) rows.push_back(split_ws(lines[i]));
  v.expect(rows.size() == kReferenceProfile.size(),
           "row count " + std::to_string(rows.size()));
  std::size_t cells = 0, mismatched = 0;
  for (std::size_t i = 0; i < std::min(rows.size(), kReferenceProfile.size()); ++i) {
    const auto& r = kReferenceProfile[i];
    const std::vector<std::string> want = {r.agent,
                                           std::to_string(r.iterations),
                                           std::to_string(r.overloads),
                                           r.activity,
                                           r.pct,
                                           r.max,
                                           r.avg,
                                           std::to_string(r.sent),
                                           std::to_string(r.received)};
    for (std::size_t c = 0; c < want.size(); ++c) {
      ++cells;
      const std::string got = c < rows[i].size() ? rows[i][c] : "<missing>";
      if (got != want[c]) {
        ++mismatched;
        v.expect(false, std::string("row ") + r.agent + " col " + std::to_string(c) + ": got " +
                            got + ", want " + want[c]);
      }
    }
    if (std::string(r.agent) == "agent001")
      v.expect(rows[i].size() > 6 && rows[i][4] == "10.90" && rows[i][6] == "0.202",
               "agent001 pct/avg");
  }
  v.note(std::to_string(cells - mismatched) + "/" + std::to_string(cells) + " cells");
}

// --- conservation ---------------------------------------------------------

void conservation(Verdict& v) {
  std::size_t rows_seen = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testing::RandomSpec spec;
    spec.seed = seed;
    spec.max_agents = 1 + static_cast<int>(seed % 40);
    const auto snap = testing::random_snapshot(spec);
    const auto p = flat_profile(snap);
    const auto tag = " (seed " + std::to_string(seed) + ")";
    rows_seen += p.rows.size();

    std::int64_t activity = 0, sent = 0, received = 0, pct = 0;
    for (const auto& r : p.rows) {
      activity += r.activity_ms;
      sent += r.msgs_sent;
      received += r.msgs_received;
      pct += r.pct_centi;
    }
    v.expect(activity == p.header.total_activity_ms, "activity sum" + tag);

    // independent message count straight from the log
    std::int64_t log_sent = 0, log_received = 0;
    for (const auto& rec : snap.events)
      if (const auto* m = std::get_if<MessageEvent>(&rec.event)) {
        log_sent += !m->sender.is_external;
        log_received += !m->receiver.is_external && m->received_at.has_value();
      }
    v.expect(sent == p.header.messages_sent && sent == log_sent, "sent totals" + tag);
    v.expect(received == p.header.messages_received && received == log_received,
             "received totals" + tag);

    // |sum pct - 100| <= 0.005 * rows, in hundredths of a percent
    if (p.header.total_activity_ms > 0)
      v.expect(2 * std::abs(pct - 10000) <= static_cast<std::int64_t>(p.rows.size()),
               "pct sum " + std::to_string(pct) + tag);

    for (std::size_t i = 1; i < p.rows.size(); ++i) {
      const auto& a = p.rows[i - 1];
      const auto& b = p.rows[i];
      v.expect(a.activity_ms > b.activity_ms ||
                   (a.activity_ms == b.activity_ms && a.name <= b.name),
               "row order" + tag);
    }
  }
  v.note(std::to_string(rows_seen) + " rows over 100 snapshots");
}

// --- roundtrip ------------------------------------------------------------

void roundtrip(Verdict& v, const fs::path& dir) {
  std::vector<std::pair<std::string, Snapshot>> cases;
  cases.emplace_back("empty", testing::empty_snapshot());
  cases.emplace_back("single", testing::single_event_snapshot());
  cases.emplace_back("100k", testing::bulk_snapshot(100000));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::RandomSpec spec;
    spec.seed = 1000 + seed;
    cases.emplace_back("random" + std::to_string(seed), testing::random_snapshot(spec));
  }
  v.expect(cases[2].second.events.size() == 100000, "bulk snapshot size");

  const auto path = dir / "roundtrip.aspot";
  for (const auto& [name, s] : cases) {
    write_snapshot(path, s);
    std::ifstream in(path, std::ios::binary);
    const std::string first{std::istreambuf_iterator<char>(in), {}};
    const Snapshot back = read_snapshot(path);
    v.expect(back == s, name + ": read(write(S)) != S");
    write_snapshot(path, back);
    std::ifstream in2(path, std::ios::binary);
    const std::string second{std::istreambuf_iterator<char>(in2), {}};
    v.expect(first == second, name + ": rewrite not byte-identical");
  }
  v.note(std::to_string(cases.size()) + " snapshots");
}

// --- benchmark scenario ----------------------------------------------------

void benchmark(Verdict& v) {
  const auto spec = bench::default_scenario();
  const Snapshot s = bench::simulate(spec);
  const FlatProfile p = flat_profile(s);

  std::set<std::string> overseers, workers;
  for (const auto& a : s.agents) (a.role == "overseer" ? overseers : workers).insert(a.agent_id);
  v.expect(overseers.size() == 2, "overseer count");

  // (a)
  auto by_iterations = p.rows;
  std::stable_sort(by_iterations.begin(), by_iterations.end(), [](const auto& a, const auto& b) {
    return a.iterations_nonzero > b.iterations_nonzero;
  });
  v.expect(by_iterations.size() >= 3 && overseers.contains(by_iterations[0].agent_id) &&
               overseers.contains(by_iterations[1].agent_id) &&
               by_iterations[1].iterations_nonzero > by_iterations[2].iterations_nonzero,
           "(a) overseers are not the two most iterated agents");
  std::int64_t overseer_sent = 0;
  for (const auto& r : p.rows)
    if (overseers.contains(r.agent_id)) overseer_sent += r.msgs_sent;
  const double sent_share = 100.0 * overseer_sent / std::max<std::int64_t>(1, p.header.messages_sent);
  v.expect(sent_share >= 80.0, "(a) overseers sent " + fmt("%.1f%%", sent_share));

  // (b)
  std::int64_t top3 = 0;
  int taken = 0;
  for (const auto& r : p.rows)
    if (workers.contains(r.agent_id) && taken < 3) {
      top3 += r.activity_ms;
      ++taken;
    }
  const double top3_share = 100.0 * top3 / std::max<DurationMs>(1, p.header.total_activity_ms);
  v.expect(top3_share >= 15.0 && top3_share <= 50.0, "(b) top-3 workers hold " + fmt("%.1f%%", top3_share));

  // (c)
  for (const auto& r : p.rows)
    if (overseers.contains(r.agent_id))
      v.expect(r.pct_centi < 300, "(c) " + r.agent_id + " at " + format_percent(r.pct_centi) + "%");

  // Phases fire when the iteration running at the configured time ends, so
  // they may lag by at most the longest iteration.
  DurationMs lag = 0;
  for (const auto& rec : s.events)
    if (const auto* it = std::get_if<IterationEvent>(&rec.event))
      lag = std::max(lag, it->duration_ms);

  // (d) live worker count over time
  std::vector<std::pair<TimestampMs, int>> population;  // after each change
  int live = 0;
  for (const auto& rec : s.events)
    if (const auto* l = std::get_if<LifecycleEvent>(&rec.event); l && workers.contains(l->agent_id)) {
      if (l->kind == LifecycleKind::created) population.emplace_back(l->at, ++live);
      if (l->kind == LifecycleKind::destroyed) population.emplace_back(l->at, --live);
    }
  auto count_at = [&](TimestampMs t) {
    int n = 0;
    for (const auto& [at, c] : population)
      if (at <= t) n = c;
    return n;
  };
  const TimestampMs grow = 600000, shrink = 860000;
  v.expect(count_at(grow - 1) == 12, "(d) " + std::to_string(count_at(grow - 1)) + " workers before growth");
  v.expect(count_at(grow + lag) == 27, "(d) " + std::to_string(count_at(grow + lag)) + " workers after growth");
  v.expect(count_at(shrink - 1) == 27, "(d) " + std::to_string(count_at(shrink - 1)) + " workers before shrink");
  v.expect(count_at(shrink + lag) == 12, "(d) " + std::to_string(count_at(shrink + lag)) + " workers after shrink");
  for (const auto& [at, c] : population) {
    const bool at_start = at == 0;
    const bool growing = at >= grow && at <= grow + lag;
    const bool shrinking = at >= shrink && at <= shrink + lag;
    const bool at_end = at == s.session.duration_ms;
    v.expect(at_start || growing || shrinking || at_end,
             "(d) population change at " + std::to_string(at));
  }
  std::int64_t created_late = 0, max_late = 0;
  for (const auto& [at, c] : population)
    if (at >= grow && at <= grow + lag) max_late = std::max<std::int64_t>(max_late, at - grow), ++created_late;

  // (e) actual pause window from the suspend / resume events
  std::set<TimestampMs> suspended, resumed;
  for (const auto& rec : s.events)
    if (const auto* l = std::get_if<LifecycleEvent>(&rec.event)) {
      if (l->kind == LifecycleKind::suspended) suspended.insert(l->at);
      if (l->kind == LifecycleKind::resumed) resumed.insert(l->at);
    }
  v.expect(suspended.size() == 1 && resumed.size() == 1, "(e) pause events not at a single instant");
  if (!suspended.empty() && !resumed.empty()) {
    const auto from = *suspended.begin(), to = *resumed.begin();
    v.expect(to - from == 20000, "(e) pause lasted " + std::to_string(to - from) + " ms");
    v.expect(from >= 840000 && from <= 840000 + lag, "(e) pause began at " + std::to_string(from));
    std::size_t inside = 0;
    for (const auto& rec : s.events)
      if (const auto* it = std::get_if<IterationEvent>(&rec.event))
        inside += it->start < to && it->end() > from;
    v.expect(inside == 0, "(e) " + std::to_string(inside) + " iterations during the pause");
    v.note("pause [" + std::to_string(from) + ", " + std::to_string(to) + ")");
  }

  v.note("overseers sent " + fmt("%.1f%%", sent_share) + ", top-3 workers " + fmt("%.1f%%", top3_share) +
         ", phase lag <= " + std::to_string(max_late) + " ms (bound " + std::to_string(lag) + ")");
}

// --- classification -------------------------------------------------------

void classification(Verdict& v) {
  v.expect(classify_slice_use(750, 1000) == SliceUse::green, "750/1000");
  v.expect(classify_slice_use(1000, 1000) == SliceUse::orange, "1000/1000");
  v.expect(classify_slice_use(1001, 1000) == SliceUse::red, "1001/1000");
  v.expect(classify_rect(751, 1000) == SliceUse::orange, "751/1000");

  // oracle with exact rational boundaries: 4d <= 3s green, d <= s orange
  auto oracle = [](std::int64_t d, std::int64_t s) {
    if (4 * d <= 3 * s) return SliceUse::green;
    if (d <= s) return SliceUse::orange;
    return SliceUse::red;
  };
  std::size_t checked = 0;
  for (std::int64_t slice : {1, 2, 3, 4, 7, 40, 333, 999, 1000, 1001, 4096}) {
    int prev = 0;
    for (std::int64_t d = 0; d <= 3 * slice + 5; ++d) {
      const auto c = classify_slice_use(d, slice);
      v.expect(c == oracle(d, slice),
               "d=" + std::to_string(d) + " slice=" + std::to_string(slice));
      v.expect(static_cast<int>(c) >= prev, "not monotone at d=" + std::to_string(d));
      prev = static_cast<int>(c);
      ++checked;
    }
  }
  v.note(std::to_string(checked) + " durations");
}

// --- scene geometry -------------------------------------------------------

using RectKey = std::tuple<Sequence, std::string, TimestampMs, TimestampMs, SliceUse>;

std::vector<RectKey> rect_keys(const SceneDescription& sc) {
  std::vector<RectKey> keys;
  for (const auto& r : sc.rects)
    keys.emplace_back(r.event_ref, sc.lanes[r.lane].agent_id, r.t_start, r.t_end, r.color);
  std::sort(keys.begin(), keys.end());
  return keys;
}

void scene_geometry(Verdict& v) {
  const Snapshot s = bench::simulate(bench::default_scenario());
  const FlatProfile p = flat_profile(s);
  const DurationMs D = s.session.duration_ms;

  // powers of two keep the width ratio exact in floating point
  const auto coarse = compile_scene(s, p, full_viewport(s.session, 0.125));
  const auto fine = compile_scene(s, p, full_viewport(s.session, 0.5));

  auto rects = coarse.rects;
  std::sort(rects.begin(), rects.end(), [](const Rect& a, const Rect& b) { return a.t_start < b.t_start; });
  for (std::size_t i = 1; i < rects.size(); ++i)
    v.expect(rects[i - 1].t_end <= rects[i].t_start,
             "rects overlap at " + std::to_string(rects[i].t_start));

  v.expect(coarse.rects.size() == fine.rects.size(), "zoom changed the rect count");
  for (std::size_t i = 0; i < std::min(coarse.rects.size(), fine.rects.size()); ++i) {
    const auto& a = coarse.rects[i];
    const auto& b = fine.rects[i];
    const double d = static_cast<double>(a.t_end - a.t_start);
    v.expect(a.event_ref == b.event_ref, "rect order differs between zooms");
    v.expect(a.width == std::max(d * 0.125, kMinRectWidthPx), "coarse width");
    v.expect(b.width == std::max(d * 0.5, kMinRectWidthPx), "fine width");
    if (d * 0.125 >= kMinRectWidthPx) v.expect(b.width == 4 * a.width, "width ratio");
    v.expect(b.x0 == 4 * a.x0, "x ratio");
  }

  std::vector<std::string> lanes, profile_order;
  for (const auto& l : coarse.lanes) lanes.push_back(l.agent_id);
  for (const auto& r : p.rows) profile_order.push_back(r.agent_id);
  v.expect(lanes == profile_order, "auto lane order differs from profile order");

  // cull over a partition and merge
  const std::vector<TimestampMs> cuts = {0, 1, 99999, 300000, 600000, 600001, 845000, 1000000, D};
  std::set<RectKey> merged;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Viewport vp = full_viewport(s.session, 0.125);
    vp.t0 = cuts[i];
    vp.t1 = cuts[i + 1];
    const auto part = compile_scene(s, p, vp);
    for (const auto& k : rect_keys(part)) merged.insert(k);
    for (const auto& r : part.rects)
      v.expect(r.t_start < vp.t1 && r.t_end >= vp.t0, "culled rect outside its view");
  }
  const auto full = rect_keys(coarse);
  v.expect(std::vector<RectKey>(merged.begin(), merged.end()) == full,
           "culled partition gives " + std::to_string(merged.size()) + " rects, full scene " +
               std::to_string(full.size()));

  for (std::size_t w : {1u, 3u, 7u, 256u, 1000u, 99991u}) {
    const auto be = birds_eye(s, w);
    DurationMs covered = 0;
    bool ordered = be.bounds.size() == w + 1 && be.bounds.front() == 0 && be.bounds.back() == D;
    for (std::size_t i = 0; i + 1 < be.bounds.size(); ++i) {
      ordered = ordered && be.bounds[i] < be.bounds[i + 1];
      covered += be.bounds[i + 1] - be.bounds[i];
    }
    v.expect(ordered && covered == D, "birds-eye bounds with " + std::to_string(w) + " buckets");
    for (const auto& l : be.lanes) v.expect(l.buckets.size() == w, "lane strip width");
  }

  // viewport rectangle in the birds-eye strip maps back within one bucket
  Viewport vp = full_viewport(s.session);
  vp.t0 = 123456;
  vp.t1 = 654321;
  const auto sc = compile_scene(s, p, vp);
  const auto& b = sc.birds_eye.bounds;
  const DurationMs bucket = D / static_cast<DurationMs>(vp.birds_eye_buckets) + 1;
  v.expect(std::abs(b[sc.view_bucket_first] - vp.t0) <= bucket &&
               std::abs(b[sc.view_bucket_last + 1] - vp.t1) <= bucket,
           "viewport does not map back to its buckets");

  v.note(std::to_string(full.size()) + " rects, " + std::to_string(lanes.size()) + " lanes");
}

// --- throughput -----------------------------------------------------------

void throughput(Verdict& v) {
  const auto snap = testing::bulk_snapshot(100000);
  const auto t0 = Steady::now();
  const auto p = flat_profile(snap);
  const double profile_s = seconds_since(t0);
  v.expect(!p.rows.empty(), "empty profile");
  v.expect(profile_s < 1.0, "flat_profile took " + fmt("%.3f s", profile_s));

  ProfilerSink sink;
  auto clock = std::make_shared<VirtualClock>(0);
  sink.begin_session("bench", 1000, clock);
  constexpr int kAgents = 16;
  constexpr int kEvents = 400000;
  for (int a = 0; a < kAgents; ++a)
    sink.register_agent({"a" + std::to_string(a), "", "worker", Rationality::reactive});
  sink.advance_to(kEvents + 10);
  for (int a = 0; a < kAgents; ++a)
    sink.record(LifecycleEvent{"a" + std::to_string(a), LifecycleKind::created, 0});
  std::vector<std::string> ids;
  for (int a = 0; a < kAgents; ++a) ids.push_back("a" + std::to_string(a));
  const auto t1 = Steady::now();
  for (int i = 0; i < kEvents; ++i)
    sink.record(IterationEvent{ids[static_cast<std::size_t>(i % kAgents)], i, 1, std::nullopt});
  const double record_s = seconds_since(t1);
  const double rate = kEvents / record_s;
  sink.end_session();
  v.expect(rate >= 100000, "sink rate " + fmt("%.0f record/s", rate));
  v.note("flat_profile(100k) " + fmt("%.3f s", profile_s) + ", sink " + fmt("%.0f record/s", rate));
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main() {
  TempDir dir;
  const std::vector<Criterion> criteria = {
      {"reference-table", 5, [&](Verdict& v) { reference_table(v, dir.path); }},
      {"conservation", 30, conservation},
      {"snapshot-roundtrip", 30, [&](Verdict& v) { roundtrip(v, dir.path); }},
      {"benchmark-scenario", 10, benchmark},
      {"classification", 0, classification},
      {"scene-geometry", 0, scene_geometry},
      {"throughput", 0, throughput},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t = Steady::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const double took = seconds_since(t);
    if (c.limit_s > 0) v.expect(took < c.limit_s, "over the " + fmt("%.0f s", c.limit_s) + " budget");
    const bool ok = v.failures.empty();
    failed += !ok;
    std::printf("%s  %-20s %7.3f s", ok ? "PASS" : "FAIL", c.name, took);
    for (const auto& n : v.notes) std::printf("  %s", n.c_str());
    std::printf("\n");
    for (const auto& f : v.failures) std::printf("      - %s\n", f.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
