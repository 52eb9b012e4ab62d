#include "spotter/scenario.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace spotter::bench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ScenarioError("expected an integer, got '" + s + "'", line);
  return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ScenarioError("expected an unsigned integer, got '" + s + "'", line);
  return v;
}

double parse_real(const std::string& s, std::size_t line) {
  // strtod honours the C locale, which is the only one this tool runs in
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ScenarioError("expected a number, got '" + s + "'", line);
  return v;
}

DurationMs parse_time(const std::string& s, std::size_t line) {
  std::int64_t scale = 1;
  std::string digits = s;
  auto ends_with = [&](std::string_view suffix) {
    return digits.size() > suffix.size() &&
           digits.compare(digits.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("ms")) {
    digits.resize(digits.size() - 2);
  } else if (ends_with("s")) {
    digits.resize(digits.size() - 1);
    scale = 1000;
  } else if (ends_with("m")) {
    digits.resize(digits.size() - 1);
    scale = 60000;
  }
  return parse_int(digits, line) * scale;
}

std::vector<std::string> expect(const std::string& value, std::size_t n, const std::string& key,
                                std::size_t line) {
  auto w = words(value);
  if (w.size() != n)
    throw ScenarioError("'" + key + "' takes " + std::to_string(n) + " value(s)", line);
  return w;
}

NormalMs parse_normal(const std::string& value, const std::string& key, std::size_t line) {
  auto w = expect(value, 2, key, line);
  return NormalMs{parse_real(w[0], line), parse_real(w[1], line)};
}

void apply_key(ScenarioSpec& spec, const std::string& key, const std::string& value,
               std::size_t line) {
  auto one = [&] { return expect(value, 1, key, line)[0]; };
  if (key == "seed") {
    spec.seed = parse_uint(one(), line);
  } else if (key == "platform") {
    spec.platform_name = one();
  } else if (key == "external_platform") {
    spec.external_platform = one();
  } else if (key == "slice_ms") {
    spec.slice_ms = parse_time(one(), line);
  } else if (key == "sampler_interval_ms") {
    spec.sampler_interval_ms = parse_time(one(), line);
  } else if (key == "epoch_utc_ms") {
    spec.epoch_utc_ms = parse_int(one(), line);
  } else if (key == "initial_workers") {
    spec.initial_workers = static_cast<int>(parse_int(one(), line));
  } else if (key == "overseers") {
    spec.overseers = static_cast<int>(parse_int(one(), line));
  } else if (key.rfind("task.", 0) == 0) {
    const auto cls = key.substr(5);
    std::size_t idx = 3;
    for (std::size_t i = 0; i < kTaskClasses.size(); ++i)
      if (to_string(kTaskClasses[i]) == cls) idx = i;
    if (idx == 3) throw ScenarioError("unknown task class '" + cls + "'", line);
    auto w = expect(value, 3, key, line);
    spec.task_mix[idx] =
        TaskSize{{parse_real(w[0], line), parse_real(w[1], line)}, parse_real(w[2], line)};
  } else if (key == "overseer_cost") {
    spec.overseer_cost = parse_normal(value, key, line);
  } else if (key == "idle_cost") {
    spec.idle_cost = parse_normal(value, key, line);
  } else if (key == "request_prob") {
    spec.request_prob = parse_real(one(), line);
  } else if (key == "burst_prob") {
    spec.burst_prob = parse_real(one(), line);
  } else if (key == "delegation_prob") {
    spec.delegation_prob = parse_real(one(), line);
  } else if (key == "refusal_cooldown_iterations") {
    spec.refusal_cooldown_iterations = static_cast<int>(parse_int(one(), line));
  } else if (key == "inter_platform_fraction") {
    spec.inter_platform_fraction = parse_real(one(), line);
  } else {
    throw ScenarioError("unknown key '" + key + "'", line);
  }
}

Phase parse_phase(const std::vector<std::string>& w, std::size_t line) {
  // w[0] == "phase"
  if (w.size() < 3) throw ScenarioError("phase needs a time and an action", line);
  Phase p;
  p.at_ms = parse_time(w[1], line);
  const auto& action = w[2];
  if (action == "set_workers" && w.size() == 4) {
    p.action = PhaseAction::set_workers;
    p.value = parse_int(w[3], line);
  } else if (action == "pause" && w.size() == 4) {
    p.action = PhaseAction::pause;
    p.value = parse_time(w[3], line);
  } else if (action == "stop" && w.size() == 3) {
    p.action = PhaseAction::stop;
  } else {
    throw ScenarioError("bad phase action '" + action + "'", line);
  }
  return p;
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// shortest form that parses back to the same double
std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

std::string_view to_string(TaskClass c) {
  switch (c) {
    case TaskClass::small: return "small";
    case TaskClass::medium: return "medium";
    case TaskClass::large: return "large";
  }
  return "?";
}

ScenarioSpec default_scenario() {
  ScenarioSpec spec;
  spec.phases = {
      Phase{600000, PhaseAction::set_workers, 27},
      Phase{840000, PhaseAction::pause, 20000},
      Phase{860000, PhaseAction::set_workers, 12},
      Phase{1160000, PhaseAction::stop, 0},
  };
  return spec;
}

void validate(const ScenarioSpec& spec) {
  if (spec.platform_name.empty()) throw ScenarioError("platform must not be empty");
  if (spec.external_platform.empty() || spec.external_platform == spec.platform_name)
    throw ScenarioError("external_platform must differ from platform");
  if (spec.slice_ms < 1) throw ScenarioError("slice_ms must be positive");
  if (spec.sampler_interval_ms < 1) throw ScenarioError("sampler_interval_ms must be positive");
  if (spec.initial_workers < 0) throw ScenarioError("initial_workers must be >= 0");
  if (spec.overseers < 1) throw ScenarioError("overseers must be >= 1");
  for (auto c : kTaskClasses) {
    const auto& t = spec.task(c);
    const std::string name(to_string(c));
    if (!(t.weight > 0)) throw ScenarioError("task." + name + " weight must be positive");
    if (!(t.duration.mean_ms > 0)) throw ScenarioError("task." + name + " mean must be positive");
    if (!(t.duration.stddev_ms >= 0)) throw ScenarioError("task." + name + " stddev must be >= 0");
  }
  if (!(spec.overseer_cost.mean_ms > 0) || !(spec.overseer_cost.stddev_ms >= 0))
    throw ScenarioError("overseer_cost needs a positive mean and non-negative stddev");
  if (!(spec.idle_cost.mean_ms >= 0) || !(spec.idle_cost.stddev_ms >= 0))
    throw ScenarioError("idle_cost needs a non-negative mean and stddev");
  if (!is_probability(spec.request_prob)) throw ScenarioError("request_prob outside [0, 1]");
  if (!is_probability(spec.burst_prob)) throw ScenarioError("burst_prob outside [0, 1]");
  if (!is_probability(spec.delegation_prob))
    throw ScenarioError("delegation_prob outside [0, 1]");
  if (!is_probability(spec.inter_platform_fraction))
    throw ScenarioError("inter_platform_fraction outside [0, 1]");
  if (spec.refusal_cooldown_iterations < 0)
    throw ScenarioError("refusal_cooldown_iterations must be >= 0");

  TimestampMs prev = -1;
  for (const auto& p : spec.phases) {
    if (p.at_ms < 0) throw ScenarioError("phase times must be >= 0");
    if (p.at_ms <= prev) throw ScenarioError("phase times must strictly increase");
    prev = p.at_ms;
    if (p.action == PhaseAction::set_workers && p.value < 0)
      throw ScenarioError("set_workers needs a count >= 0");
    if (p.action == PhaseAction::pause && p.value <= 0)
      throw ScenarioError("pause needs a positive duration");
  }
}

ScenarioSpec parse_scenario(std::istream& in) {
  ScenarioSpec spec;
  spec.phases.clear();
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (const auto eq = text.find('='); eq != std::string::npos) {
      apply_key(spec, trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line);
      continue;
    }
    auto w = words(text);
    if (w[0] != "phase") throw ScenarioError("expected 'key = value' or 'phase ...'", line);
    spec.phases.push_back(parse_phase(w, line));
  }
  validate(spec);
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
  try {
    return parse_scenario(in);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

std::string render_scenario(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "seed = " << spec.seed << "\n"
     << "platform = " << spec.platform_name << "\n"
     << "external_platform = " << spec.external_platform << "\n"
     << "slice_ms = " << spec.slice_ms << "\n"
     << "sampler_interval_ms = " << spec.sampler_interval_ms << "\n"
     << "epoch_utc_ms = " << spec.epoch_utc_ms << "\n"
     << "initial_workers = " << spec.initial_workers << "\n"
     << "overseers = " << spec.overseers << "\n";
  for (auto c : kTaskClasses) {
    const auto& t = spec.task(c);
    os << "task." << to_string(c) << " = " << num(t.duration.mean_ms) << ' '
       << num(t.duration.stddev_ms) << ' ' << num(t.weight) << "\n";
  }
  os << "overseer_cost = " << num(spec.overseer_cost.mean_ms) << ' '
     << num(spec.overseer_cost.stddev_ms) << "\n"
     << "idle_cost = " << num(spec.idle_cost.mean_ms) << ' ' << num(spec.idle_cost.stddev_ms)
     << "\n"
     << "request_prob = " << num(spec.request_prob) << "\n"
     << "burst_prob = " << num(spec.burst_prob) << "\n"
     << "delegation_prob = " << num(spec.delegation_prob) << "\n"
     << "refusal_cooldown_iterations = " << spec.refusal_cooldown_iterations << "\n"
     << "inter_platform_fraction = " << num(spec.inter_platform_fraction) << "\n";
  for (const auto& p : spec.phases) {
    os << "phase " << p.at_ms << ' ';
    switch (p.action) {
      case PhaseAction::set_workers: os << "set_workers " << p.value; break;
      case PhaseAction::pause: os << "pause " << p.value; break;
      case PhaseAction::stop: os << "stop"; break;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace spotter::bench
