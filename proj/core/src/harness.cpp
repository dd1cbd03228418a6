#include "searchact/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace searchact {
namespace {

using json = nlohmann::json;

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- config fields ----------------------------------------------------------

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

struct Field {
  const char* key;
  void (*read)(ScenarioConfig&, const json&, const std::string&);
  void (*write)(const ScenarioConfig&, json&, const std::string&);
};

#define SA_NUMBER(name, member)                                                              \
  Field {                                                                                    \
    name, [](ScenarioConfig& c, const json& v, const std::string& k) { c.member = get_number(v, k); }, \
        [](const ScenarioConfig& c, json& j, const std::string& k) { j[k] = c.member; }      \
  }
#define SA_INT(name, member)                                                                 \
  Field {                                                                                    \
    name, [](ScenarioConfig& c, const json& v, const std::string& k) { c.member = get_int(v, k); }, \
        [](const ScenarioConfig& c, json& j, const std::string& k) { j[k] = c.member; }      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      SA_NUMBER("width_m", grid.width_m),
      SA_NUMBER("height_m", grid.height_m),
      SA_NUMBER("cell_size_m", grid.cell_size_m),
      SA_NUMBER("drop_box_x", grid.drop_box.x),
      SA_NUMBER("drop_box_y", grid.drop_box.y),
      SA_INT("static_1pt", objects.static_1pt),
      SA_INT("static_2pt", objects.static_2pt),
      SA_INT("static_3pt", objects.static_3pt),
      SA_INT("moving_3pt", objects.moving_3pt),
      SA_NUMBER("object_speed", object_speed),
      SA_INT("uav_count", uav_count),
      SA_NUMBER("uav_speed", cost.uav_speed),
      SA_NUMBER("t_pick_static", cost.t_pick_static),
      SA_NUMBER("t_pick_moving", cost.t_pick_moving),
      SA_NUMBER("t_drop_static", cost.t_drop_static),
      SA_NUMBER("t_drop_moving", cost.t_drop_moving),
      SA_NUMBER("t0", t0),
      SA_NUMBER("tracking_timeout", tracking_timeout),
      SA_NUMBER("calc_time", calc_time),
      SA_NUMBER("p_out", p_out),
      SA_INT("horizon", horizon),
      SA_NUMBER("idle_wait", idle_wait),
      SA_NUMBER("heading_period", heading_period),
      SA_NUMBER("crash_time", crash_time),
      Field{"seed",
            [](ScenarioConfig& c, const json& v, const std::string& k) {
              if (!v.is_number_unsigned()) {
                throw ConfigError("config key '" + k + "' must be a nonnegative integer");
              }
              c.seed = v.get<std::uint64_t>();
            },
            [](const ScenarioConfig& c, json& j, const std::string& k) { j[k] = c.seed; }},
      Field{"strategy",
            [](ScenarioConfig& c, const json& v, const std::string& k) {
              if (!v.is_string()) throw ConfigError("config key '" + k + "' must be a string");
              c.strategy = strategy_from_string(v.get<std::string>());
            },
            [](const ScenarioConfig& c, json& j, const std::string& k) {
              j[k] = std::string(to_string(c.strategy));
            }},
      Field{"crash_agent",
            [](ScenarioConfig& c, const json& v, const std::string& k) {
              if (v.is_null()) {
                c.crash_agent.reset();
              } else {
                c.crash_agent = get_int(v, k);
              }
            },
            [](const ScenarioConfig& c, json& j, const std::string& k) {
              j[k] = c.crash_agent ? json(*c.crash_agent) : json(nullptr);
            }},
      Field{"placements",
            [](ScenarioConfig& c, const json& v, const std::string& k) {
              if (!v.is_array()) throw ConfigError("config key '" + k + "' must be an array");
              c.placements.clear();
              for (const json& p : v) {
                if (!p.is_object()) throw ConfigError("placements entries must be objects");
                for (const auto& [pk, pv] : p.items()) {
                  if (pk != "kind" && pk != "points" && pk != "x" && pk != "y") {
                    throw ConfigError("unknown placement key '" + pk + "'");
                  }
                }
                if (!p.contains("kind") || !p.contains("points") || !p.contains("x") ||
                    !p.contains("y")) {
                  throw ConfigError("placements need kind, points, x and y");
                }
                if (!p["kind"].is_string()) throw ConfigError("placement kind must be a string");
                Placement pl;
                try {
                  pl.cls.kind = object_kind_from_string(p["kind"].get<std::string>());
                } catch (const std::invalid_argument& e) {
                  throw ConfigError(e.what());
                }
                pl.cls.points = get_int(p["points"], "points");
                pl.pos = {get_number(p["x"], "x"), get_number(p["y"], "y")};
                c.placements.push_back(pl);
              }
            },
            [](const ScenarioConfig& c, json& j, const std::string& k) {
              json arr = json::array();
              for (const Placement& p : c.placements) {
                arr.push_back({{"kind", std::string(to_string(p.cls.kind))},
                               {"points", p.cls.points},
                               {"x", p.pos.x},
                               {"y", p.pos.y}});
              }
              j[k] = arr;
            }},
  };
  return all;
}

#undef SA_NUMBER
#undef SA_INT

}  // namespace

ScenarioConfig config_from_json(std::string_view text, ScenarioConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const auto& all = fields();
    auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) { return key == f.key; });
    if (it == all.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->read(base, value, key);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  base.validate();
  return base;
}

ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j = json::object();
  for (const Field& f : fields()) f.write(cfg, j, f.key);
  return j.dump(2) + "\n";
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

// --- sweeps -----------------------------------------------------------------

void SweepSpec::validate() const {
  if (trials_per_t0 < 0) throw ConfigError("trials must be nonnegative");
  for (double t : t0_values) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("t0 values must be nonnegative");
  }
}

std::vector<SweepGroup> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepGroup> groups;
  for (const SweepRow& r : rows) {
    if (groups.empty() || groups.back().strategy != r.strategy || groups.back().t0 != r.t0) {
      groups.push_back({r.strategy, r.t0, 0, 0.0, r.score, r.score});
    }
    SweepGroup& g = groups.back();
    g.trials++;
    g.mean += r.score;
    g.min = std::min(g.min, r.score);
    g.max = std::max(g.max, r.score);
  }
  for (SweepGroup& g : groups) g.mean /= g.trials;
  return groups;
}

SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                      const SweepOptions& options) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (Strategy st : spec.strategies) {
    for (double t0 : spec.t0_values) {
      for (int trial = 0; trial < spec.trials_per_t0; ++trial) {
        rows.push_back({st, t0, spec.base_seed + static_cast<std::uint64_t>(trial), 0, 0.0, {}});
      }
    }
  }
  if (!rows.empty()) {
    ScenarioConfig probe = base;
    probe.strategy = rows.front().strategy;
    probe.t0 = rows.front().t0;
    probe.validate();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      ScenarioConfig cfg = base;
      cfg.strategy = row.strategy;
      cfg.t0 = row.t0;
      cfg.seed = row.seed;
      const auto start = std::chrono::steady_clock::now();
      MissionReport r = run_mission(cfg);
      const auto stop = std::chrono::steady_clock::now();
      row.score = r.final_score;
      if (options.timing) {
        row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      }
      if (options.keep_logs) row.log = r.log.text();
    }
  };
  const int jobs = std::max(1, options.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.strategy != b.strategy) return a.strategy < b.strategy;
    if (a.t0 != b.t0) return a.t0 < b.t0;
    return a.seed < b.seed;
  });
  SweepResult result;
  result.groups = aggregate(rows);
  result.rows = std::move(rows);
  return result;
}

std::string rows_csv(const SweepResult& result) {
  std::string out = "strategy,t0,seed,score,runtime_ms\n";
  for (const SweepRow& r : result.rows) {
    out += fmt("%s,%g,%llu,%d,%.3f\n", std::string(to_string(r.strategy)).c_str(), r.t0,
               static_cast<unsigned long long>(r.seed), r.score, r.runtime_ms);
  }
  return out;
}

std::string groups_csv(const SweepResult& result) {
  std::string out = "strategy,t0,trials,mean,min,max\n";
  for (const SweepGroup& g : result.groups) {
    out += fmt("%s,%g,%d,%.6f,%d,%d\n", std::string(to_string(g.strategy)).c_str(), g.t0,
               g.trials, g.mean, g.min, g.max);
  }
  return out;
}

std::filesystem::path aggregates_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_filename(csv_path.stem().string() + "_aggregates" + csv_path.extension().string());
  return p;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw HarnessIoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw HarnessIoError("failed writing " + path.string());
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  write_text(path, rows_csv(result));
  write_text(aggregates_path(path), groups_csv(result));
}

// --- replay -----------------------------------------------------------------

ReplayViolation::ReplayViolation(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::map<std::string, std::string> key_values(const std::string& payload) {
  std::map<std::string, std::string> out;
  std::istringstream in(payload);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

std::vector<long long> integers(const std::string& payload, std::size_t count, int line) {
  std::istringstream in(payload);
  std::vector<long long> out(count);
  for (long long& v : out) {
    if (!(in >> v)) throw LogParseError(line, "expected " + std::to_string(count) + " integers");
  }
  return out;
}

enum class Held { InField, Carried, Delivered, Lost };

struct ObjectTrack {
  int points = 0;
  Held state = Held::InField;
  int carrier = -1;
  bool detected = false;
};

MissionReport replay_events(const std::vector<LogEvent>& events, const std::vector<int>& lines) {
  if (events.empty()) throw LogParseError(1, "empty log");
  const LogEvent& head = events.front();
  if (head.kind != "CONFIG") throw LogParseError(lines[0], "log must start with CONFIG");
  auto kv = key_values(head.payload);
  for (const char* k : {"seed", "strategy", "t0", "uav_count", "objects"}) {
    if (!kv.contains(k)) throw LogParseError(lines[0], std::string("CONFIG lacks ") + k);
  }
  MissionReport r;
  int uav_count = 0;
  std::size_t object_count = 0;
  try {
    r.seed = std::stoull(kv["seed"]);
    r.strategy = strategy_from_string(kv["strategy"]);
    r.t0 = std::stod(kv["t0"]);
    uav_count = std::stoi(kv["uav_count"]);
    object_count = static_cast<std::size_t>(std::stoul(kv["objects"]));
  } catch (const std::exception& e) {
    throw LogParseError(lines[0], std::string("bad CONFIG: ") + e.what());
  }

  std::vector<ObjectTrack> objects;
  std::vector<std::optional<int>> claim(static_cast<std::size_t>(std::max(uav_count, 0)));
  std::vector<bool> crashed(claim.size(), false);
  std::vector<std::optional<int>> carrying(claim.size());
  int score = 0;
  double last_time = 0.0;
  bool ended = false;

  for (std::size_t i = 1; i < events.size(); ++i) {
    const LogEvent& e = events[i];
    const int line = lines[i];
    auto violation = [&](const std::string& what) { throw ReplayViolation(line, what); };
    if (ended) throw LogParseError(line, "event after END");
    if (e.time < last_time) violation("time goes backwards");
    if (e.time > r.t0 + 1e-9) violation(e.kind + " after the time limit");
    last_time = e.time;
    if (e.agent < -1 || e.agent >= uav_count) violation("unknown agent " + std::to_string(e.agent));
    const bool world = e.agent < 0;
    const std::size_t a = world ? 0 : static_cast<std::size_t>(e.agent);
    if (!world && crashed[a] && e.kind != "LOST") {
      violation("crashed agent " + std::to_string(e.agent) + " logged " + e.kind);
    }
    auto object = [&](long long id) -> ObjectTrack& {
      if (id < 0 || static_cast<std::size_t>(id) >= objects.size()) {
        violation("unknown object " + std::to_string(id));
      }
      return objects[static_cast<std::size_t>(id)];
    };
    auto need_agent = [&] {
      if (world) violation(e.kind + " needs an agent");
    };

    if (e.kind == "OBJECT") {
      std::istringstream in(e.payload);
      long long id = -1;
      std::string kind;
      int points = 0;
      double x = 0.0;
      double y = 0.0;
      if (!(in >> id >> kind >> points >> x >> y)) throw LogParseError(line, "bad OBJECT payload");
      if (id != static_cast<long long>(objects.size())) violation("object ids out of order");
      objects.push_back({points, Held::InField, -1, false});
    } else if (e.kind == "DETECT") {
      need_agent();
      object(integers(e.payload, 1, line)[0]).detected = true;
    } else if (e.kind == "TASK_EXPIRE") {
      object(integers(e.payload, 1, line)[0]);
    } else if (e.kind == "DECIDE") {
      need_agent();
      ++r.decisions;
      claim[a].reset();
    } else if (e.kind == "CLAIM") {
      need_agent();
      const int id = static_cast<int>(integers(e.payload, 1, line)[0]);
      object(id);
      for (std::size_t j = 0; j < claim.size(); ++j) {
        if (j != a && claim[j] == id) {
          violation("object " + std::to_string(id) + " claimed by agent " + std::to_string(e.agent) +
                    " while held by agent " + std::to_string(j));
        }
      }
      claim[a] = id;
    } else if (e.kind == "RELEASE") {
      const int id = static_cast<int>(integers(e.payload, 1, line)[0]);
      object(id);
      for (auto& c : claim) {
        if (c == id) c.reset();
      }
    } else if (e.kind == "PICK_START") {
      need_agent();
      ObjectTrack& o = object(integers(e.payload, 1, line)[0]);
      if (!o.detected) violation("pickup of an undetected object");
      if (o.state != Held::InField) violation("pickup of an object not in the field");
    } else if (e.kind == "PICKED") {
      need_agent();
      const int id = static_cast<int>(integers(e.payload, 1, line)[0]);
      ObjectTrack& o = object(id);
      if (!o.detected) violation("pickup of an undetected object");
      if (o.state != Held::InField) violation("pickup of an object not in the field");
      if (carrying[a]) violation("agent already carries an object");
      o.state = Held::Carried;
      o.carrier = e.agent;
      carrying[a] = id;
    } else if (e.kind == "DELIVER") {
      need_agent();
      const auto v = integers(e.payload, 3, line);
      ObjectTrack& o = object(v[0]);
      if (o.state != Held::Carried || o.carrier != e.agent) {
        violation("delivery of an object the agent does not carry");
      }
      if (v[1] != o.points) violation("delivered points differ from the object's");
      o.state = Held::Delivered;
      carrying[a].reset();
      claim[a].reset();
      score += o.points;
      if (v[2] != score) {
        violation("logged score " + std::to_string(v[2]) + " but deliveries sum to " +
                  std::to_string(score));
      }
      r.trace.push_back({e.time, score});
      ++r.delivered;
    } else if (e.kind == "CRASH") {
      need_agent();
      crashed[a] = true;
    } else if (e.kind == "LOST") {
      need_agent();
      if (!crashed[a]) violation("object lost by an agent that has not crashed");
      ObjectTrack& o = object(integers(e.payload, 1, line)[0]);
      if (o.state != Held::Carried || o.carrier != e.agent) {
        violation("lost object was not carried by the agent");
      }
      o.state = Held::Lost;
      carrying[a].reset();
      ++r.lost;
    } else if (e.kind == "END") {
      if (std::fabs(e.time - r.t0) > 1e-6) violation("END is not at the time limit");
      const long long logged = integers(e.payload, 1, line)[0];
      if (logged != score) {
        violation("END reports " + std::to_string(logged) + " but deliveries sum to " +
                  std::to_string(score));
      }
      ended = true;
    } else {
      throw LogParseError(line, "unknown event kind '" + e.kind + "'");
    }
  }
  if (!ended) throw LogParseError(lines.back() + 1, "log ends without END");
  if (objects.size() != object_count) {
    throw ReplayViolation(lines.back(), "CONFIG lists " + std::to_string(object_count) +
                                            " objects but the log places " +
                                            std::to_string(objects.size()));
  }

  r.final_score = score;
  for (const LogEvent& e : events) r.log.add(e.time, e.kind, e.agent, e.payload);
  return r;
}

}  // namespace

MissionReport replay(const std::vector<LogEvent>& events) {
  std::vector<int> lines(events.size());
  for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = static_cast<int>(i) + 1;
  return replay_events(events, lines);
}

MissionReport replay(std::istream& in) {
  std::vector<LogEvent> events;
  std::vector<int> lines;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    events.push_back(parse_event(line, no));
    lines.push_back(no);
  }
  return replay_events(events, lines);
}

MissionReport replay_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw HarnessIoError("cannot read log " + path.string());
  return replay(in);
}

std::string report_to_json(const MissionReport& report) {
  json trace = json::array();
  for (const ScorePoint& p : report.trace) trace.push_back({{"time", p.time}, {"score", p.score}});
  json j = {{"strategy", std::string(to_string(report.strategy))},
            {"seed", report.seed},
            {"t0", report.t0},
            {"final_score", report.final_score},
            {"delivered", report.delivered},
            {"lost", report.lost},
            {"decisions", report.decisions},
            {"events", report.log.size()},
            {"trace", trace}};
  return j.dump(2) + "\n";
}

}  // namespace searchact
