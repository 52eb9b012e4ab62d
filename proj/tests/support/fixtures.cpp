#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "spotter/validation.hpp"

namespace spotter::testing {

const std::vector<ReferenceRow> kReferenceProfile = {
    {"agent001", 338, 22, "1:08.564", "10.90", "3.740", "0.202", 6, 57},
    {"agent009", 365, 21, "1:04.257", "10.21", "3.425", "0.176", 13, 77},
    {"agent004", 349, 22, "1:01.529", "9.78", "3.235", "0.176", 10, 69},
    {"agent014", 284, 14, "46.413", "7.38", "3.148", "0.163", 2, 36},
    {"agent003", 401, 13, "43.881", "6.97", "3.323", "0.109", 12, 76},
    {"agent006", 361, 12, "40.141", "6.38", "3.279", "0.111", 12, 73},
    {"agent005", 367, 12, "34.903", "5.55", "3.325", "0.095", 17, 76},
    {"agent013", 301, 9, "34.716", "5.52", "3.190", "0.115", 14, 71},
    {"agent007", 378, 11, "31.864", "5.06", "3.356", "0.084", 21, 71},
    {"agent008", 357, 7, "30.850", "4.90", "3.201", "0.086", 14, 72},
    {"agent010", 330, 8, "30.280", "4.81", "3.147", "0.091", 21, 81},
    {"agent015", 285, 9, "29.382", "4.67", "3.257", "0.103", 4, 42},
    {"agent002", 348, 8, "23.196", "3.69", "3.147", "0.066", 9, 70},
    {"agent011", 357, 5, "19.363", "3.08", "3.095", "0.054", 4, 39},
    {"agent012", 225, 3, "13.172", "2.09", "3.049", "0.058", 9, 41},
    {"master2", 901, 0, "6.681", "1.06", "0.183", "0.007", 504, 86},
    {"master1", 873, 0, "6.485", "1.03", "0.227", "0.007", 514, 82},
    {"agent024", 46, 2, "6.281", "1.00", "3.045", "0.136", 3, 7},
    {"agent019", 31, 1, "4.449", "0.71", "3.014", "0.143", 0, 5},
    {"agent026", 42, 1, "4.400", "0.70", "3.084", "0.104", 0, 4},
    {"agent030", 26, 1, "4.002", "0.64", "3.132", "0.153", 2, 8},
    {"agent017", 46, 1, "3.811", "0.61", "3.031", "0.082", 0, 3},
    {"agent025", 40, 1, "3.767", "0.60", "3.006", "0.094", 0, 3},
    {"agent027", 31, 1, "3.694", "0.59", "3.103", "0.119", 0, 2},
    {"agent018", 38, 1, "3.384", "0.54", "3.044", "0.089", 2, 7},
    {"agent020", 39, 0, "1.762", "0.28", "0.547", "0.045", 0, 3},
    {"agent022", 47, 0, "1.523", "0.24", "0.559", "0.032", 5, 13},
    {"agent021", 32, 0, "1.300", "0.21", "0.555", "0.040", 2, 7},
    {"agent016", 219, 0, "1.194", "0.19", "0.555", "0.005", 2, 6},
    {"agent029", 38, 0, "1.039", "0.17", "0.550", "0.027", 2, 8},
    {"agent028", 45, 0, "0.749", "0.12", "0.546", "0.016", 1, 4},
    {"agent032", 34, 0, "0.749", "0.12", "0.561", "0.022", 1, 4},
    {"agent031", 36, 0, "0.742", "0.12", "0.545", "0.020", 0, 2},
    {"agent023", 40, 0, "0.598", "0.10", "0.543", "0.014", 0, 1},
    {"agent033", 30, 0, "0.043", "0.01", "0.003", "0.001", 0, 0},
};

std::int64_t parse_clock_ms(const std::string& s) {
  int m = 0, sec = 0, ms = 0;
  if (std::sscanf(s.c_str(), "%d:%d.%d", &m, &sec, &ms) == 3) return (m * 60 + sec) * 1000LL + ms;
  if (std::sscanf(s.c_str(), "%d.%d", &sec, &ms) == 2) return sec * 1000LL + ms;
  throw std::invalid_argument("bad clock value '" + s + "'");
}

std::vector<std::int64_t> reference_iterations(const ReferenceRow& row, std::int64_t slice_ms) {
  const std::int64_t activity = parse_clock_ms(row.activity);
  const std::int64_t max = parse_clock_ms(row.max);
  std::vector<std::int64_t> d;
  d.push_back(max);
  for (std::int64_t i = 1; i < row.overloads; ++i) d.push_back(slice_ms + 1);

  const std::int64_t rest_n = row.iterations - static_cast<std::int64_t>(d.size());
  const std::int64_t rest_sum = activity - max - (row.overloads > 0 ? (row.overloads - 1) * (slice_ms + 1) : 0);
  const std::int64_t cap = row.overloads > 0 ? std::min(slice_ms, max) : max;
  if (rest_n < 0 || rest_sum < rest_n || rest_sum > rest_n * cap)
    throw std::logic_error(std::string("row ") + row.agent + " cannot be realised");
  for (std::int64_t i = 0; i < rest_n; ++i)
    d.push_back(rest_sum / rest_n + (i < rest_sum % rest_n ? 1 : 0));
  return d;
}

namespace {

void finish(Snapshot& s) {
  // seq in insertion order, then the log order the store expects
  for (std::size_t i = 0; i < s.events.size(); ++i) s.events[i].seq = i;
  std::stable_sort(s.events.begin(), s.events.end(), record_less);
}

void push(Snapshot& s, TraceEvent e) { s.events.push_back(EventRecord{0, std::move(e)}); }

MessageEvent make_message(std::uint64_t n, Endpoint from, Endpoint to, TimestampMs sent,
                          std::optional<TimestampMs> received) {
  char id[32];
  std::snprintf(id, sizeof id, "m%06llu", static_cast<unsigned long long>(n));
  MessageEvent m;
  m.message_id = id;
  m.scope = from.is_external || to.is_external ? MessageScope::inter_platform
                                               : MessageScope::intra_platform;
  m.sender = std::move(from);
  m.receiver = std::move(to);
  m.sent_at = sent;
  m.received_at = received;
  m.headers.performative = "inform";
  m.headers.content = "(ping " + std::to_string(n) + ")";
  return m;
}

}  // namespace

Snapshot reference_snapshot() {
  Snapshot s;
  s.session.session_id = "reference-fixture";
  s.session.platform_name = "benchmark";
  s.session.started_at_wallclock_ms = 1243850400000;
  s.session.duration_ms = parse_clock_ms(kReferenceSessionTime);
  s.session.slice_ms = 1000;

  for (const auto& row : kReferenceProfile) {
    const bool overseer = std::string(row.agent).rfind("master", 0) == 0;
    s.agents.push_back(AgentDescriptor{row.agent, row.agent, overseer ? "overseer" : "worker",
                                       overseer ? Rationality::deliberative
                                                : Rationality::reactive});
    push(s, LifecycleEvent{row.agent, LifecycleKind::created, 0});
    push(s, LifecycleEvent{row.agent, LifecycleKind::started, 0});
  }

  // iterations laid end to end, one agent after another
  TimestampMs cursor = 0;
  for (const auto& row : kReferenceProfile)
    for (auto d : reference_iterations(row, s.session.slice_ms)) {
      push(s, IterationEvent{row.agent, cursor, d, std::nullopt});
      cursor += d;
    }

  // pair the expanded sender list with a rotated receiver list so nobody
  // messages themselves
  std::vector<std::string> senders, receivers;
  for (const auto& row : kReferenceProfile) {
    senders.insert(senders.end(), static_cast<std::size_t>(row.sent), row.agent);
    receivers.insert(receivers.end(), static_cast<std::size_t>(row.received), row.agent);
  }
  if (senders.size() != receivers.size()) throw std::logic_error("sent and received differ");
  std::size_t shift = 0;
  auto clash = [&] {
    for (std::size_t i = 0; i < senders.size(); ++i)
      if (senders[i] == receivers[(i + shift) % receivers.size()]) return true;
    return false;
  };
  while (clash()) ++shift;
  for (std::size_t i = 0; i < senders.size(); ++i) {
    const TimestampMs sent = 5 + static_cast<TimestampMs>(i) * 900;
    push(s, make_message(i + 1, Endpoint{"benchmark", senders[i], false},
                         Endpoint{"benchmark", receivers[(i + shift) % receivers.size()], false},
                         sent, sent + 4));
  }
  finish(s);
  return s;
}

Snapshot random_snapshot(const RandomSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  auto uni = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };

  Snapshot s;
  s.session.session_id = "random-" + std::to_string(spec.seed);
  s.session.platform_name = "local";
  s.session.started_at_wallclock_ms = 1'600'000'000'000 + static_cast<std::int64_t>(spec.seed);
  s.session.slice_ms = uni(0, 3) == 0 ? 500 : 1000;

  const int n_agents = static_cast<int>(uni(0, spec.max_agents));
  std::vector<TimestampMs> born;
  for (int i = 0; i < n_agents; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "a%02d", i);
    const bool deliberative = uni(0, 3) == 0;
    // a few shared names exercise the id tiebreak
    const std::string name = uni(0, 5) == 0 ? "twin" : id;
    s.agents.push_back(AgentDescriptor{id, name, deliberative ? "planner" : "worker",
                                       deliberative ? Rationality::deliberative
                                                    : Rationality::reactive});
    born.push_back(uni(0, 1500));
    push(s, LifecycleEvent{id, LifecycleKind::created, born.back()});
    push(s, LifecycleEvent{id, LifecycleKind::started, born.back()});
  }

  TimestampMs cursor = 0;
  if (n_agents > 0) {
    const auto n_iter = uni(0, spec.max_iterations);
    for (std::int64_t k = 0; k < n_iter; ++k) {
      cursor += uni(0, 40);
      const auto i = static_cast<std::size_t>(uni(0, n_agents - 1));
      if (born[i] > cursor) continue;
      const auto bucket = uni(0, 9);
      const DurationMs d = bucket == 0   ? 0
                           : bucket < 7 ? uni(1, s.session.slice_ms * 3 / 4)
                           : bucket < 9 ? uni(s.session.slice_ms * 3 / 4, s.session.slice_ms + 1)
                                        : uni(s.session.slice_ms, s.session.slice_ms * 3);
      std::optional<IterationBreakdown> breakdown;
      if (s.agents[i].rationality == Rationality::deliberative) {
        const DurationMs p = d / 3, r = d / 3;
        breakdown = IterationBreakdown{p, r, d - p - r};
      }
      push(s, IterationEvent{s.agents[i].agent_id, cursor, d, breakdown});
      cursor += d;
    }
  }
  s.session.duration_ms = std::max<TimestampMs>(cursor, 1500) + uni(0, 500);
  const TimestampMs end = s.session.duration_ms;

  if (n_agents > 0) {
    const auto n_simple = uni(0, spec.max_simple);
    for (std::int64_t k = 0; k < n_simple; ++k) {
      const auto i = static_cast<std::size_t>(uni(0, n_agents - 1));
      push(s, SimpleEvent{s.agents[i].agent_id, uni(born[i], end),
                          uni(0, 1) ? "message_received" : "checkpoint", std::nullopt});
    }
    const auto n_msg = uni(0, spec.max_messages);
    for (std::int64_t k = 0; k < n_msg; ++k) {
      const auto a = static_cast<std::size_t>(uni(0, n_agents - 1));
      const auto b = static_cast<std::size_t>(uni(0, n_agents - 1));
      Endpoint from{"local", s.agents[a].agent_id, false};
      Endpoint to{"local", s.agents[b].agent_id, false};
      const auto ext = spec.with_external ? uni(0, 9) : 9;
      if (ext == 0) from = Endpoint{uni(0, 1) ? "remote" : "archive", "r1", true};
      if (ext == 1) to = Endpoint{"remote", "r2", true};
      const TimestampMs sent = uni(0, end);
      std::optional<TimestampMs> received;
      if (uni(0, 9) > 0) received = std::min(end, sent + uni(0, 200));
      push(s, make_message(static_cast<std::uint64_t>(k), from, to, sent, received));
    }
    for (std::size_t i = 0; i < born.size(); ++i)
      if (uni(0, 3) == 0) {
        push(s, LifecycleEvent{s.agents[i].agent_id, LifecycleKind::stopped, end});
        push(s, LifecycleEvent{s.agents[i].agent_id, LifecycleKind::destroyed, end});
      }
  }
  for (TimestampMs t = 1000; t <= end; t += 1000)
    push(s, CpuSample{t, static_cast<std::int32_t>(uni(0, 10000))});

  finish(s);
  return s;
}

Snapshot bulk_snapshot(std::size_t events, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Snapshot s;
  s.session.session_id = "bulk-" + std::to_string(events);
  s.session.platform_name = "local";
  s.session.slice_ms = 1000;
  const std::vector<std::string> ids = {"w1", "w2", "w3", "w4", "w5"};
  std::size_t made = 0;
  for (const auto& id : ids) {
    s.agents.push_back(AgentDescriptor{id, id, "worker", Rationality::reactive});
    if (made < events) push(s, LifecycleEvent{id, LifecycleKind::created, 0}), ++made;
  }
  TimestampMs cursor = 0, next_cpu = 1000;
  std::uint64_t msg = 0;
  for (std::size_t k = 0; made < events; ++k, ++made) {
    const auto& id = ids[k % ids.size()];
    if (cursor >= next_cpu) {
      push(s, CpuSample{next_cpu, static_cast<std::int32_t>(rng() % 10001)});
      next_cpu += 1000;
    } else if (k % 10 == 3) {
      push(s, make_message(++msg, Endpoint{"local", id, false},
                           Endpoint{"local", ids[(k + 1) % ids.size()], false}, cursor, cursor + 1));
    } else if (k % 10 == 7) {
      push(s, SimpleEvent{id, cursor, "message_received", std::nullopt});
    } else {
      const DurationMs d = static_cast<DurationMs>(rng() % 1500);
      push(s, IterationEvent{id, cursor, d, std::nullopt});
      cursor += d;
    }
  }
  s.session.duration_ms = cursor + 1;
  finish(s);
  return s;
}

Snapshot empty_snapshot() {
  Snapshot s;
  s.session.session_id = "empty";
  s.session.platform_name = "local";
  return s;
}

Snapshot single_event_snapshot() {
  Snapshot s = empty_snapshot();
  s.session.session_id = "single";
  s.session.duration_ms = 10;
  s.agents.push_back(AgentDescriptor{"solo", "solo", "worker", Rationality::reactive});
  push(s, LifecycleEvent{"solo", LifecycleKind::created, 0});
  finish(s);
  return s;
}

std::string first_invalid_event(const Snapshot& snapshot) {
  AgentSet known;
  for (const auto& a : snapshot.agents) known.insert(a.agent_id);
  LifecycleLedger ledger;
  for (const auto& r : snapshot.events) {
    if (auto err = validate_event(r.event, snapshot.session, known, ledger))
      return "seq " + std::to_string(r.seq) + ": " + err->message;
    ledger.apply(r.event);
  }
  return {};
}

}  // namespace spotter::testing
