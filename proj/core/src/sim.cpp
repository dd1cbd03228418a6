#include "searchact/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <set>

namespace searchact {
namespace {

constexpr double kReachEps = 1e-6;

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string cell_text(CellIndex c) { return std::to_string(c.col) + ":" + std::to_string(c.row); }

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Proposed: return "proposed";
    case Strategy::Random: return "random";
    case Strategy::CoverFieldFirst: return "cover_first";
    case Strategy::CoverAndPickup: return "cover_pickup";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  for (Strategy v : {Strategy::Proposed, Strategy::Random, Strategy::CoverFieldFirst,
                     Strategy::CoverAndPickup}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown strategy '" + std::string(s) +
                    "' (expected proposed, random, cover_first or cover_pickup)");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Deciding: return "deciding";
    case Phase::Exploring: return "exploring";
    case Phase::Approaching: return "approaching";
    case Phase::Picking: return "picking";
    case Phase::Transferring: return "transferring";
    case Phase::Dropping: return "dropping";
    case Phase::Crashed: return "crashed";
    case Phase::Idle: return "idle";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  try {
    grid.validate();
    cost.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  need(objects.static_1pt >= 0 && objects.static_2pt >= 0 && objects.static_3pt >= 0 &&
           objects.moving_3pt >= 0,
       "object counts must be nonnegative");
  need(object_speed >= 0.0 && std::isfinite(object_speed), "object_speed must be nonnegative");
  need(uav_count >= 1, "uav_count must be at least 1");
  need(t0 >= 0.0 && std::isfinite(t0), "t0 must be nonnegative");
  need(tracking_timeout >= 0.0, "tracking_timeout must be nonnegative");
  need(calc_time >= 0.0, "calc_time must be nonnegative");
  need(p_out >= 0.0 && p_out <= 1.0, "p_out must lie in [0, 1]");
  need(horizon >= 1, "horizon must be at least 1");
  need(idle_wait > 0.0, "idle_wait must be positive");
  need(heading_period > 0.0, "heading_period must be positive");
  for (const Placement& p : placements) {
    try {
      p.cls.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    need(grid.contains(p.pos), "placement outside the arena");
  }
  if (crash_agent) {
    need(*crash_agent >= 0 && *crash_agent < uav_count, "crash_agent out of range");
    need(crash_time >= 0.0, "crash_time must be nonnegative");
  }
}

PlannerParams ScenarioConfig::planner_params() const {
  PlannerParams p;
  p.grid = grid;
  p.cost = cost;
  p.calc_time = calc_time;
  p.tracking_timeout = tracking_timeout;
  p.horizon = horizon;
  return p;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::index(std::size_t n) {
  __extension__ using Wide = unsigned __int128;
  return static_cast<std::size_t>((static_cast<Wide>(next()) * n) >> 64);
}

int MissionReport::score_at(double t) const {
  int s = 0;
  for (const ScorePoint& p : trace) {
    if (p.time > t) break;
    s = p.score;
  }
  return s;
}

MissionState make_initial_state(const ScenarioConfig& cfg) {
  cfg.validate();
  MissionState s;
  s.cfg = cfg;
  s.claims = ClaimBoard(cfg.uav_count);

  std::vector<Placement> placed = cfg.placements;
  if (placed.empty()) {
    Rng rng(cfg.seed, 0);
    auto add = [&](int count, ObjectKind kind, int points) {
      for (int i = 0; i < count; ++i) {
        const double x = rng.uniform(0.0, cfg.grid.width_m);
        const double y = rng.uniform(0.0, cfg.grid.height_m);
        placed.push_back({ObjectClass{kind, points}, Position{x, y}});
      }
    };
    add(cfg.objects.static_1pt, ObjectKind::Static, 1);
    add(cfg.objects.static_2pt, ObjectKind::Static, 2);
    add(cfg.objects.static_3pt, ObjectKind::Static, 3);
    add(cfg.objects.moving_3pt, ObjectKind::Moving, 3);
  }

  s.log.add(0.0, "CONFIG", -1,
            fmt("seed=%llu strategy=%s t0=%.6f uav_count=%d objects=%d",
                static_cast<unsigned long long>(cfg.seed), std::string(to_string(cfg.strategy)).c_str(),
                cfg.t0, cfg.uav_count, static_cast<int>(placed.size())));

  for (std::size_t i = 0; i < placed.size(); ++i) {
    SimObject o;
    o.object_id = static_cast<int>(i);
    o.cls = placed[i].cls;
    o.true_pos = placed[i].pos;
    o.rng = Rng(cfg.seed, 1000 + i);
    if (o.cls.kind == ObjectKind::Moving) {
      o.heading = o.rng.uniform(0.0, 2.0 * std::numbers::pi);
      o.next_turn = cfg.heading_period;
    }
    s.log.add(0.0, "OBJECT", -1,
              fmt("%d %s %d %.6f %.6f", o.object_id, std::string(to_string(o.cls.kind)).c_str(),
                  o.cls.points, o.true_pos.x, o.true_pos.y));
    s.knowledge.beliefs.push_back(BeliefGrid::uniform(o.object_id, o.cls.kind, cfg.grid));
    s.objects.push_back(std::move(o));
  }
  s.knowledge.ever_detected.assign(s.objects.size(), false);

  for (int a = 0; a < cfg.uav_count; ++a) {
    AgentState ag;
    ag.agent_id = a;
    ag.pos = ag.leg_from = ag.leg_to = ag.free_pos = cfg.grid.drop_box;
    s.agents.push_back(ag);
  }
  return s;
}

void step_moving_objects(MissionState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_moving_objects: dt must be positive");
  const double w = state.cfg.grid.width_m;
  const double h = state.cfg.grid.height_m;
  for (SimObject& o : state.objects) {
    if (o.cls.kind != ObjectKind::Moving || o.status != ObjectStatus::InField || o.pinned) continue;
    while (state.clock >= o.next_turn) {
      o.heading = o.rng.uniform(0.0, 2.0 * std::numbers::pi);
      o.next_turn += state.cfg.heading_period;
    }
    const double d = state.cfg.object_speed * dt;
    double x = o.true_pos.x + d * std::cos(o.heading);
    double y = o.true_pos.y + d * std::sin(o.heading);
    if (x < 0.0) {
      x = -x;
      o.heading = std::numbers::pi - o.heading;
    } else if (x > w) {
      x = 2.0 * w - x;
      o.heading = std::numbers::pi - o.heading;
    }
    if (y < 0.0) {
      y = -y;
      o.heading = -o.heading;
    } else if (y > h) {
      y = 2.0 * h - y;
      o.heading = -o.heading;
    }
    o.true_pos = {std::clamp(x, 0.0, w), std::clamp(y, 0.0, h)};
  }
}

Observation sense(MissionState& state, int agent) {
  const AgentState& a = state.agents.at(agent);
  if (a.phase == Phase::Crashed) throw std::domain_error("sense: agent has crashed");
  const GridSpec& g = state.cfg.grid;
  const CellIndex cell = cell_of(a.pos, g);
  Observation obs{{cell}, {}, state.clock};
  Knowledge& k = state.knowledge;
  for (const SimObject& o : state.objects) {
    if (o.status != ObjectStatus::InField) continue;
    BeliefGrid& belief = k.beliefs[o.object_id];
    if (cell_of(o.true_pos, g) == cell) {
      obs.detections.push_back({o.object_id, cell});
      auto it = k.found.find(o.object_id);
      if (it == k.found.end()) {
        FoundTask task = make_found_task(o.object_id, o.cls, cell, state.clock, g);
        task.est_pos = o.true_pos;
        k.found.emplace(o.object_id, task);
        k.ever_detected[o.object_id] = true;
        belief = BeliefGrid::point_mass(o.object_id, o.cls.kind, g, cell);
        state.log.add(state.clock, "DETECT", agent,
                      fmt("%d %s", o.object_id, cell_text(cell).c_str()));
      } else {
        it->second.last_seen = state.clock;
        it->second.est_pos = o.true_pos;
      }
    } else if (!k.found.contains(o.object_id)) {
      belief = measurement_update(belief, Observation{{cell}, {}, state.clock});
    }
  }
  return obs;
}

void inject_crash(MissionState& state, int agent) {
  if (agent < 0 || agent >= static_cast<int>(state.agents.size())) {
    throw std::domain_error("inject_crash: unknown agent " + std::to_string(agent));
  }
  AgentState& a = state.agents[agent];
  if (a.phase == Phase::Crashed) return;
  a.phase = Phase::Crashed;
  a.generation++;
  a.waypoints.clear();
  a.leg_from = a.leg_to = a.pos;
  state.log.add(state.clock, "CRASH", agent);
  if (a.carried) {
    state.objects[*a.carried].status = ObjectStatus::Lost;
    state.log.add(state.clock, "LOST", agent, std::to_string(*a.carried));
    a.carried.reset();
  }
  if (a.target) {
    state.objects[*a.target].pinned = false;
    a.target.reset();
  }
  state.claims.mark_crashed(agent);
}

// ---------------------------------------------------------------------------

namespace {

enum class EvKind { Tick, Arrive, PickDone, DropDone, ActionStart, IdleDone, Crash };

struct Event {
  double time;
  std::uint64_t seq;
  EvKind kind;
  int agent;
  std::uint64_t gen;

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

struct Controller {
  Rng rng;
  std::optional<PlanAction> pending;
  std::vector<Position> route;
  std::size_t route_next = 0;
  bool coverage_done = false;
  std::optional<Position> resume;
  std::vector<int> pending_static;
};

}  // namespace

struct Simulator::Impl {
  MissionState s;
  PlannerParams params;
  std::vector<Controller> ctl;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  int decisions = 0;
  int delivered = 0;
  int lost = 0;
  bool ran = false;

  explicit Impl(const ScenarioConfig& cfg) : s(make_initial_state(cfg)), params(cfg.planner_params()) {
    for (int a = 0; a < cfg.uav_count; ++a) {
      Controller c;
      c.rng = Rng(cfg.seed, 2000 + static_cast<std::uint64_t>(a));
      ctl.push_back(std::move(c));
    }
    if (cfg.crash_agent) schedule(cfg.crash_time, EvKind::Crash, *cfg.crash_agent, 0);
  }

  const ScenarioConfig& cfg() const { return s.cfg; }

  void schedule(double t, EvKind kind, int agent, std::uint64_t gen) {
    queue.push(Event{t, seq++, kind, agent, gen});
  }

  // --- motion -------------------------------------------------------------

  void sync_positions() {
    for (AgentState& a : s.agents) {
      if (a.phase == Phase::Crashed || a.leg_end <= a.leg_start) continue;
      const double f = std::clamp((s.clock - a.leg_start) / (a.leg_end - a.leg_start), 0.0, 1.0);
      a.pos = {a.leg_from.x + f * (a.leg_to.x - a.leg_from.x),
               a.leg_from.y + f * (a.leg_to.y - a.leg_from.y)};
    }
  }

  void start_leg(AgentState& a) {
    a.leg_from = a.pos;
    a.leg_to = a.waypoints.front();
    a.leg_start = s.clock;
    a.leg_end = s.clock + distance(a.leg_from, a.leg_to) / cfg().cost.uav_speed;
    schedule(a.leg_end, EvKind::Arrive, a.agent_id, a.generation);
  }

  void fly(AgentState& a, std::vector<Position> waypoints, Phase phase) {
    a.generation++;
    a.phase = phase;
    a.waypoints = std::move(waypoints);
    if (a.waypoints.empty()) a.waypoints.push_back(a.pos);
    start_leg(a);
  }

  void hold(AgentState& a) {
    a.leg_from = a.leg_to = a.pos;
    a.leg_start = a.leg_end = s.clock;
  }

  // --- tasks --------------------------------------------------------------

  bool claimable(int object_id) const {
    const SimObject& o = s.objects[object_id];
    return o.status == ObjectStatus::InField && s.knowledge.found.contains(object_id) &&
           !s.claims.claimed_tasks(-1).contains(object_id);
  }

  void notice_crashes(int agent) {
    for (int task : s.claims.acknowledge_crashes()) {
      s.log.add(s.clock, "RELEASE", agent, std::to_string(task));
    }
  }

  void claim(AgentState& a, int object_id) {
    s.claims.post(a.agent_id, ExecuteTask{object_id});
    s.log.add(s.clock, "CLAIM", a.agent_id, std::to_string(object_id));
  }

  void approach(AgentState& a, int object_id) {
    a.target = object_id;
    a.busy_since = s.clock;
    fly(a, {s.objects[object_id].true_pos}, Phase::Approaching);
  }

  void on_reached_target(AgentState& a) {
    SimObject& o = s.objects[*a.target];
    if (distance(a.pos, o.true_pos) > kReachEps) {
      fly(a, {o.true_pos}, Phase::Approaching);
      return;
    }
    o.pinned = true;
    a.phase = Phase::Picking;
    hold(a);
    s.log.add(s.clock, "PICK_START", a.agent_id, std::to_string(o.object_id));
    schedule(s.clock + cfg().cost.t_pick(o.cls.kind), EvKind::PickDone, a.agent_id, a.generation);
  }

  void on_pick_done(AgentState& a) {
    SimObject& o = s.objects[*a.target];
    o.pinned = false;
    o.status = ObjectStatus::BeingCarried;
    s.knowledge.found.erase(o.object_id);
    a.carried = o.object_id;
    a.target.reset();
    s.log.add(s.clock, "PICKED", a.agent_id, std::to_string(o.object_id));
    fly(a, {cfg().grid.drop_box}, Phase::Transferring);
  }

  void on_drop_done(AgentState& a) {
    SimObject& o = s.objects[*a.carried];
    o.status = ObjectStatus::Delivered;
    a.carried.reset();
    s.score += o.cls.points;
    s.trace.push_back({s.clock, s.score});
    ++delivered;
    s.log.add(s.clock, "DELIVER", a.agent_id,
              fmt("%d %d %d", o.object_id, o.cls.points, s.score));
    s.claims.release(a.agent_id);
    a.budget_used += s.clock - a.busy_since;
    after_delivery(a);
  }

  // --- strategies ---------------------------------------------------------

  void agent_free(AgentState& a) {
    switch (cfg().strategy) {
      case Strategy::Proposed: decide(a); break;
      case Strategy::Random: random_step(a); break;
      case Strategy::CoverFieldFirst:
        if (ctl[a.agent_id].coverage_done) cover_first_next(a);
        else cover_step(a);
        break;
      case Strategy::CoverAndPickup: cover_step(a); break;
    }
  }

  void after_delivery(AgentState& a) {
    if (cfg().strategy == Strategy::CoverAndPickup) {
      Controller& c = ctl[a.agent_id];
      notice_crashes(a.agent_id);
      while (!c.pending_static.empty()) {
        const int id = c.pending_static.front();
        c.pending_static.erase(c.pending_static.begin());
        if (claimable(id)) {
          claim(a, id);
          approach(a, id);
          return;
        }
      }
      a.busy_since = s.clock;
      if (c.resume) {
        fly(a, {*c.resume}, Phase::Exploring);
        return;
      }
    }
    agent_free(a);
  }

  // Proposed: plan now, commit after the calculation time.
  void decide(AgentState& a) {
    a.phase = Phase::Deciding;
    a.busy_since = s.clock;
    hold(a);
    a.generation++;

    PlanContext ctx;
    ctx.my_id = a.agent_id;
    ctx.now = s.clock;
    ctx.my_position = a.pos;
    ctx.my_budget = cfg().t0 - s.clock - cfg().calc_time;
    for (const auto& [id, task] : s.knowledge.found) ctx.found_tasks.push_back(task);
    for (const SimObject& o : s.objects) {
      if (o.status == ObjectStatus::InField && !s.knowledge.found.contains(o.object_id)) {
        ctx.beliefs.push_back({o.cls, s.knowledge.beliefs[o.object_id]});
      }
    }
    for (const AgentState& p : s.agents) {
      if (p.agent_id == a.agent_id) continue;
      const double ready = std::max(s.clock, p.free_at);
      ctx.peers.push_back(
          {p.agent_id, p.free_pos, std::max(0.0, cfg().t0 - ready - cfg().calc_time), ready});
    }

    Decision d = replan(std::move(ctx), s.claims, params, cfg().horizon);
    ++decisions;
    for (int task : d.released) s.log.add(s.clock, "RELEASE", a.agent_id, std::to_string(task));

    std::string top;
    for (const ScoredAction& sa : d.top) {
      if (!top.empty()) top += ',';
      top += fmt("%.6f", sa.value);
    }
    const double start = s.clock + cfg().calc_time;
    if (const auto* e = std::get_if<ExploreAction>(&d.action)) {
      std::string path;
      for (const CellIndex c : e->path) {
        if (!path.empty()) path += ',';
        path += cell_text(c);
      }
      s.log.add(s.clock, "DECIDE", a.agent_id,
                fmt("explore %s cost=%.6f top=%s", path.c_str(), e->cost, top.c_str()));
      a.free_at = start + e->cost;
      a.free_pos = cell_center(e->path.back(), cfg().grid);
    } else if (const auto* t = std::get_if<ExecuteTask>(&d.action)) {
      s.log.add(s.clock, "DECIDE", a.agent_id, fmt("execute %d top=%s", t->task_id, top.c_str()));
      s.log.add(s.clock, "CLAIM", a.agent_id, std::to_string(t->task_id));
      a.free_at = start + task_cost_from(a.pos, s.knowledge.found.at(t->task_id), cfg().cost,
                                         cfg().grid);
      a.free_pos = cfg().grid.drop_box;
    } else {
      s.log.add(s.clock, "DECIDE", a.agent_id, fmt("idle top=%s", top.c_str()));
      a.free_at = start + cfg().idle_wait;
      a.free_pos = a.pos;
    }
    ctl[a.agent_id].pending = std::move(d.action);
    schedule(start, EvKind::ActionStart, a.agent_id, a.generation);
  }

  void on_action_start(AgentState& a) {
    PlanAction action = std::move(*ctl[a.agent_id].pending);
    ctl[a.agent_id].pending.reset();
    a.budget_used += s.clock - a.busy_since;
    a.busy_since = s.clock;
    if (const auto* e = std::get_if<ExploreAction>(&action)) {
      std::vector<Position> wps;
      for (const CellIndex c : e->path) wps.push_back(cell_center(c, cfg().grid));
      fly(a, std::move(wps), Phase::Exploring);
    } else if (const auto* t = std::get_if<ExecuteTask>(&action)) {
      if (s.objects[t->task_id].status != ObjectStatus::InField) {
        s.claims.release(a.agent_id);
        s.log.add(s.clock, "RELEASE", a.agent_id, std::to_string(t->task_id));
        decide(a);
        return;
      }
      approach(a, t->task_id);
    } else {
      a.phase = Phase::Idle;
      schedule(s.clock + cfg().idle_wait, EvKind::IdleDone, a.agent_id, a.generation);
    }
  }

  std::vector<CellIndex> neighbor_cells(const AgentState& a) const {
    return neighbors(cell_of(a.pos, cfg().grid), cfg().grid, Connectivity::Four);
  }

  void random_step(AgentState& a) {
    notice_crashes(a.agent_id);
    const std::vector<CellIndex> n = neighbor_cells(a);
    const CellIndex next = n[ctl[a.agent_id].rng.index(n.size())];
    a.busy_since = s.clock;
    fly(a, {cell_center(next, cfg().grid)}, Phase::Exploring);
  }

  std::vector<Position> band_route(int agent) const {
    const GridSpec& g = cfg().grid;
    const int m = cfg().uav_count;
    int r0 = agent * g.rows() / m;
    int r1 = (agent + 1) * g.rows() / m;
    if (r0 == r1) {
      r0 = 0;
      r1 = g.rows();
    }
    std::vector<Position> route;
    for (int r = r0; r < r1; ++r) {
      for (int k = 0; k < g.cols(); ++k) {
        const int col = (r - r0) % 2 == 0 ? k : g.cols() - 1 - k;
        route.push_back(cell_center({col, r}, g));
      }
    }
    return route;
  }

  void cover_step(AgentState& a) {
    notice_crashes(a.agent_id);
    Controller& c = ctl[a.agent_id];
    if (c.route.empty()) c.route = band_route(a.agent_id);
    if (c.route_next >= c.route.size()) {
      if (cfg().strategy == Strategy::CoverFieldFirst) {
        c.coverage_done = true;
        cover_first_next(a);
        return;
      }
      std::reverse(c.route.begin(), c.route.end());
      c.route_next = 0;
    }
    a.busy_since = s.clock;
    fly(a, {c.route[c.route_next]}, Phase::Exploring);
  }

  void cover_first_next(AgentState& a) {
    notice_crashes(a.agent_id);
    std::optional<int> best;
    double best_ratio = 0.0;
    for (const auto& [id, task] : s.knowledge.found) {
      if (task.cls.kind != ObjectKind::Static || !claimable(id)) continue;
      const double ratio = task_cost_from(a.pos, task, cfg().cost, cfg().grid) / task.reward;
      if (!best || ratio < best_ratio) {
        best = id;
        best_ratio = ratio;
      }
    }
    if (best) {
      claim(a, *best);
      approach(a, *best);
      return;
    }
    random_step(a);
  }

  void on_arrive(AgentState& a) {
    a.pos = a.leg_to;
    a.waypoints.erase(a.waypoints.begin());
    if (!a.waypoints.empty()) {
      start_leg(a);
      return;
    }
    hold(a);
    switch (a.phase) {
      case Phase::Approaching: on_reached_target(a); break;
      case Phase::Transferring:
        a.phase = Phase::Dropping;
        schedule(s.clock + cfg().cost.t_drop(s.objects[*a.carried].cls.kind), EvKind::DropDone,
                 a.agent_id, a.generation);
        break;
      case Phase::Exploring: {
        a.budget_used += s.clock - a.busy_since;
        Controller& c = ctl[a.agent_id];
        const bool covering = cfg().strategy == Strategy::CoverAndPickup ||
                              (cfg().strategy == Strategy::CoverFieldFirst && !c.coverage_done);
        if (covering) {
          if (c.resume) c.resume.reset();
          else c.route_next++;
        }
        agent_free(a);
        break;
      }
      default: break;
    }
  }

  // Benchmarks react to their own detections. A Proposed agent replans when it
  // spots a moving object nobody holds, since the track expires quickly.
  void react(AgentState& a, const Observation& obs, const std::set<int>& known) {
    const Strategy st = cfg().strategy;
    if (obs.detections.empty()) return;
    if (st == Strategy::Proposed) {
      if (a.phase != Phase::Exploring) return;
      for (const Detection& d : obs.detections) {
        if (!known.contains(d.object_id) && s.objects[d.object_id].cls.kind == ObjectKind::Moving &&
            claimable(d.object_id)) {
          a.budget_used += s.clock - a.busy_since;
          decide(a);
          return;
        }
      }
      return;
    }
    Controller& c = ctl[a.agent_id];
    notice_crashes(a.agent_id);
    std::optional<int> pick;
    for (const Detection& d : obs.detections) {
      if (!claimable(d.object_id)) continue;
      if (a.phase != Phase::Exploring) {
        if (st == Strategy::CoverAndPickup &&
            s.objects[d.object_id].cls.kind == ObjectKind::Static &&
            std::find(c.pending_static.begin(), c.pending_static.end(), d.object_id) ==
                c.pending_static.end()) {
          c.pending_static.push_back(d.object_id);
        }
        continue;
      }
      if (st == Strategy::CoverFieldFirst && !c.coverage_done) continue;
      if (!pick) pick = d.object_id;
    }
    if (!pick) return;
    if (st == Strategy::CoverAndPickup && !c.resume) c.resume = a.pos;
    a.budget_used += s.clock - a.busy_since;
    claim(a, *pick);
    approach(a, *pick);
  }

  // --- world --------------------------------------------------------------

  void on_tick() {
    step_moving_objects(s, 1.0);
    Knowledge& k = s.knowledge;
    const MotionParams motion{cfg().p_out, 1.0};
    for (const SimObject& o : s.objects) {
      if (o.cls.kind == ObjectKind::Moving && o.status == ObjectStatus::InField &&
          !k.found.contains(o.object_id)) {
        k.beliefs[o.object_id] = predict_moving(k.beliefs[o.object_id], motion);
      }
    }
    const std::set<int> claimed = s.claims.claimed_tasks(-1);
    for (auto it = k.found.begin(); it != k.found.end();) {
      FoundTask& t = it->second;
      const SimObject& o = s.objects[t.task_id];
      if (t.cls.kind == ObjectKind::Moving && claimed.contains(t.task_id)) {
        t.est_pos = o.true_pos;
        t.last_seen = s.clock;
      } else if (is_expired(t, s.clock, cfg().tracking_timeout)) {
        k.beliefs[t.task_id] = BeliefGrid::point_mass(t.task_id, t.cls.kind, cfg().grid,
                                                      cell_of(t.est_pos, cfg().grid));
        s.log.add(s.clock, "TASK_EXPIRE", -1, std::to_string(t.task_id));
        it = k.found.erase(it);
        continue;
      }
      ++it;
    }
    for (AgentState& a : s.agents) {
      if (a.phase == Phase::Approaching && a.target &&
          s.objects[*a.target].cls.kind == ObjectKind::Moving) {
        fly(a, {s.objects[*a.target].true_pos}, Phase::Approaching);
      }
    }
    sense_all();
  }

  void sense_all() {
    for (AgentState& a : s.agents) {
      if (a.phase == Phase::Crashed) continue;
      std::set<int> known;
      for (const auto& [id, task] : s.knowledge.found) known.insert(id);
      const Observation obs = sense(s, a.agent_id);
      react(a, obs, known);
    }
  }

  void dispatch(const Event& e) {
    if (e.kind == EvKind::Tick) {
      on_tick();
      if (e.time + 1.0 <= cfg().t0) schedule(e.time + 1.0, EvKind::Tick, -1, 0);
      return;
    }
    AgentState& a = s.agents[e.agent];
    if (e.kind == EvKind::Crash) {
      searchact::inject_crash(s, e.agent);
      return;
    }
    if (a.phase == Phase::Crashed || e.gen != a.generation) return;
    switch (e.kind) {
      case EvKind::Arrive: on_arrive(a); break;
      case EvKind::PickDone: on_pick_done(a); break;
      case EvKind::DropDone: on_drop_done(a); break;
      case EvKind::ActionStart: on_action_start(a); break;
      case EvKind::IdleDone:
        a.budget_used += s.clock - a.busy_since;
        agent_free(a);
        break;
      default: break;
    }
  }

  MissionReport run() {
    if (ran) throw std::logic_error("Simulator::run called twice");
    ran = true;
    const double t0 = cfg().t0;
    while (!queue.empty() && queue.top().time <= 0.0) {
      const Event e = queue.top();
      queue.pop();
      dispatch(e);
    }
    if (t0 > 0.0) {
      sense_all();
      for (AgentState& a : s.agents) {
        if (a.phase == Phase::Idle) agent_free(a);
      }
      if (1.0 <= t0) schedule(1.0, EvKind::Tick, -1, 0);
    }
    while (!queue.empty() && queue.top().time <= t0) {
      const Event e = queue.top();
      queue.pop();
      s.clock = e.time;
      sync_positions();
      dispatch(e);
    }
    s.clock = t0;
    sync_positions();
    for (const SimObject& o : s.objects) lost += o.status == ObjectStatus::Lost;
    s.log.add(t0, "END", -1, std::to_string(s.score));

    MissionReport r;
    r.strategy = cfg().strategy;
    r.seed = cfg().seed;
    r.t0 = t0;
    r.final_score = s.score;
    r.trace = s.trace;
    r.delivered = delivered;
    r.lost = lost;
    r.decisions = decisions;
    r.log = s.log;
    return r;
  }
};

Simulator::Simulator(const ScenarioConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {}
Simulator::~Simulator() = default;

void Simulator::inject_crash(int agent, double time) {
  if (agent < 0 || agent >= impl_->cfg().uav_count) {
    throw std::domain_error("inject_crash: unknown agent " + std::to_string(agent));
  }
  impl_->schedule(time, EvKind::Crash, agent, 0);
}

MissionReport Simulator::run() { return impl_->run(); }

const MissionState& Simulator::state() const { return impl_->s; }

MissionReport run_mission(const ScenarioConfig& cfg) { return Simulator(cfg).run(); }

MissionReport run_strategy_random(ScenarioConfig cfg) {
  cfg.strategy = Strategy::Random;
  return run_mission(cfg);
}

MissionReport run_strategy_cover_first(ScenarioConfig cfg) {
  cfg.strategy = Strategy::CoverFieldFirst;
  return run_mission(cfg);
}

MissionReport run_strategy_cover_pickup(ScenarioConfig cfg) {
  cfg.strategy = Strategy::CoverAndPickup;
  return run_mission(cfg);
}

}  // namespace searchact
