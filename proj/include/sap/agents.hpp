#pragma once

#include <memory>

#include "sap/executor.hpp"
#include "sap/planner.hpp"
#include "sap/recognize.hpp"
#include "sap/sen.hpp"
#include "sap/trajectory.hpp"

namespace sap {

// One recognize -> search -> replan event, kept for reports.
struct ReplanEvent {
  int tick = 0;
  Strategy recognized;
  std::array<double, 6> confidence{};
  Strategy response;
  double predicted_win = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin_episode(Player seat, const GameState& start) = 0;
  virtual Assignments act(const GameState& s, const Trajectory& traj) = 0;
  virtual void end_episode(const Trajectory& traj) { (void)traj; }
  virtual std::string name() const = 0;
  virtual const std::vector<ReplanEvent>* replan_events() const { return nullptr; }
};

// --- plan-driven agents --------------------------------------------------------

// Shared skeleton: replan every `interval` ticks through the planner port,
// execute through the shared controller in between.
class PlanDrivenAgent : public Agent {
 public:
  PlanDrivenAgent(PlannerPort planner, std::vector<ExpertTip> tips, int interval)
      : planner_(std::move(planner)), tips_(std::move(tips)), interval_(interval) {}

  void begin_episode(Player seat, const GameState& start) override {
    seat_ = seat;
    exec_ = make_executor(seat, Plan{});
    last_plan_tick_ = -1;
    (void)start;
  }

  Assignments act(const GameState& s, const Trajectory& traj) override {
    if (s.tick % interval_ == 0 && s.tick != last_plan_tick_) {
      last_plan_tick_ = s.tick;
      Strategy chosen = choose_strategy(s, traj);
      exec_ = make_executor(seat_, planner_(s, seat_, chosen, tips_));
    }
    return tick_controller(s, exec_);
  }

  Player seat() const { return seat_; }
  int interval() const { return interval_; }

 protected:
  virtual Strategy choose_strategy(const GameState& s, const Trajectory& traj) = 0;

  PlannerPort planner_;
  std::vector<ExpertTip> tips_;
  int interval_;
  Player seat_ = Player::P1;
  ExecutorState exec_;
  int last_plan_tick_ = -1;
};

class FixedStrategyAgent : public PlanDrivenAgent {
 public:
  FixedStrategyAgent(Strategy s, PlannerPort planner, std::vector<ExpertTip> tips, int interval)
      : PlanDrivenAgent(std::move(planner), std::move(tips), interval), strategy_(s) {}

  std::string name() const override { return "fixed(" + strategy_to_string(strategy_) + ")"; }

 protected:
  Strategy choose_strategy(const GameState&, const Trajectory&) override { return strategy_; }

 private:
  Strategy strategy_;
};

// plan-level baseline: observation-only planning, no strategy conditioning,
// no tips
class VanillaAgent : public PlanDrivenAgent {
 public:
  VanillaAgent(PlannerPort planner, int interval)
      : PlanDrivenAgent(std::move(planner), {}, interval) {}
  std::string name() const override { return "vanilla"; }

 protected:
  Strategy choose_strategy(const GameState&, const Trajectory&) override {
    return k_neutral_strategy;
  }
};

// plan-level baseline: the full tip sheet applied unconditionally
class TipsAugmentedAgent : public PlanDrivenAgent {
 public:
  TipsAugmentedAgent(std::vector<ExpertTip> tips, int interval, PlannerConfig cfg = {})
      : PlanDrivenAgent(make_port(cfg), std::move(tips), interval) {}
  std::string name() const override { return "tips-augmented"; }

 protected:
  Strategy choose_strategy(const GameState&, const Trajectory&) override {
    return k_neutral_strategy;
  }

 private:
  static PlannerPort make_port(PlannerConfig cfg) {
    cfg.tips_unconditional = true;
    return rule_planner_port(cfg);
  }
};

// Response search under recognition uncertainty. Per-dimension confidence c
// defines an opponent posterior: each dimension is the recognized value with
// probability c, otherwise uniform over its domain. The chosen response
// maximizes the mean predicted win probability over a seeded posterior
// sample. With full confidence every sample collapses onto the recognized
// strategy and this is exactly the exhaustive point search.
inline BestResponse expected_best_response(const SENParams& sen, const Recognized& rec,
                                           int samples = 16,
                                           std::uint64_t salt = 0x5eb0a5a5u) {
  Rng rng(salt);
  std::set<StrategyVector> seen_opponents;
  std::vector<StrategyVector> opponents{encode(rec.strategy)};
  seen_opponents.insert(opponents[0]);

  auto draw_value = [&](int domain_size) {
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(domain_size)));
  };
  for (int k = 0; k < samples; ++k) {
    Strategy s = rec.strategy;
    auto keep = [&](int dim) { return rng.next_double() < rec.confidence[static_cast<std::size_t>(dim)]; };
    if (!keep(0)) s.economy = static_cast<Economy>(draw_value(3));
    if (!keep(1)) s.barracks = static_cast<BarracksTiming>(draw_value(3));
    if (!keep(2)) s.composition = static_cast<Composition>(draw_value(5));
    if (!keep(3)) s.aggression = draw_value(2) == 1;
    if (!keep(4)) s.attack_target = static_cast<AttackTarget>(draw_value(3));
    if (!keep(5)) s.defense = static_cast<DefensePosture>(draw_value(3));
    if (!s.valid()) s.barracks = BarracksTiming::Early;
    StrategyVector v = encode(s);
    if (seen_opponents.insert(v).second) opponents.push_back(v);
  }

  if (opponents.size() == 1) {
    BestResponse br = best_response(sen, rec.strategy);
    return br;
  }

  BestResponse best{enumerate_space().front(), -1.0};
  for (const Strategy& cand : enumerate_space()) {
    StrategyVector cv = encode(cand);
    double mean = 0.0;
    for (const StrategyVector& opp : opponents) mean += forward(sen, cv, opp);
    mean /= static_cast<double>(opponents.size());
    if (mean > best.win_probability) {
      best.strategy = cand;
      best.win_probability = mean;
    }
  }
  return best;
}

// Counter heuristic used when no evaluation network is available. The
// posture dimensions answer the opponent inverted (attack the passive, dig
// in against the aggressor); production counters their composition instead
// of copying it, since a blind copy of a misread opponent loses on tempo.
inline Strategy heuristic_counter(const Strategy& recognized) {
  Strategy out;
  out.economy = Economy::Med;
  out.barracks = BarracksTiming::Early;
  switch (recognized.composition) {
    case Composition::Worker: out.composition = Composition::Light; break;
    case Composition::Light: out.composition = Composition::Heavy; break;
    case Composition::Ranged: out.composition = Composition::Light; break;
    default: out.composition = Composition::Heavy; break;
  }
  out.aggression = !recognized.aggression;
  out.attack_target = AttackTarget::Closest;
  out.defense = recognized.aggression ? DefensePosture::Full : DefensePosture::None;
  return out;
}

enum class SapMode : std::uint8_t { Full, PerEpisode, NoSen, NoTips };

inline const char* to_string(SapMode m) {
  switch (m) {
    case SapMode::Full: return "sap";
    case SapMode::PerEpisode: return "sap-epe";
    case SapMode::NoSen: return "sap-nosen";
    default: return "sap-notips";
  }
}

// The adaptive agent: every `interval` ticks it summarizes the opponent's
// trajectory, recognizes their strategy, searches the response that
// maximizes the evaluation network, and replans. PerEpisode mode locks the
// response chosen from the previous episode's trajectory instead.
class SapAgent : public PlanDrivenAgent {
 public:
  SapAgent(const SENParams* sen, RecognizerPort recognizer, PlannerPort planner,
           std::vector<ExpertTip> tips, int interval, SapMode mode = SapMode::Full)
      : PlanDrivenAgent(std::move(planner),
                        mode == SapMode::NoTips ? std::vector<ExpertTip>{} : std::move(tips),
                        interval),
        sen_(sen),
        recognizer_(std::move(recognizer)),
        mode_(mode) {
    if (mode_ != SapMode::NoSen && sen_ == nullptr)
      throw std::invalid_argument("sap agent needs network parameters");
  }

  void begin_episode(Player seat, const GameState& start) override {
    PlanDrivenAgent::begin_episode(seat, start);
    events_.clear();
    if (mode_ == SapMode::PerEpisode) {
      Recognized rec =
          carried_ ? recognizer_(carried_->of(enemy_of(seat))) : recognizer_(PlayerSummary{});
      episode_response_ = pick_response(rec);
      episode_event_ = ReplanEvent{0, rec.strategy, rec.confidence, episode_response_->strategy,
                                   episode_response_->win_probability};
    }
  }

  void end_episode(const Trajectory& traj) override {
    if (mode_ == SapMode::PerEpisode) carried_ = traj.extract();
  }

  std::string name() const override { return to_string(mode_); }
  const std::vector<ReplanEvent>* replan_events() const override { return &events_; }

 protected:
  Strategy choose_strategy(const GameState& s, const Trajectory& traj) override {
    if (mode_ == SapMode::PerEpisode) {
      if (s.tick == 0 && episode_event_) events_.push_back(*episode_event_);
      return episode_response_ ? episode_response_->strategy : k_neutral_strategy;
    }
    TrajectorySummary sum = traj.extract();
    Recognized rec = recognizer_(sum.of(enemy_of(seat_)));
    BestResponse resp = pick_response(rec);
    events_.push_back(
        {s.tick, rec.strategy, rec.confidence, resp.strategy, resp.win_probability});
    return resp.strategy;
  }

 private:
  BestResponse pick_response(const Recognized& rec) const {
    if (mode_ == SapMode::NoSen) return {heuristic_counter(rec.strategy), 0.0};
    return expected_best_response(*sen_, rec, response_samples_);
  }

  const SENParams* sen_;
  RecognizerPort recognizer_;
  SapMode mode_;
  int response_samples_ = 16;
  std::vector<ReplanEvent> events_;
  std::optional<TrajectorySummary> carried_;
  std::optional<BestResponse> episode_response_;
  std::optional<ReplanEvent> episode_event_;
};

// --- scripted atomic-level bots --------------------------------------------------

enum class BotKind : std::uint8_t { Passive, WorkerRushLike, LightRushLike, RandomBiased };

inline const char* to_string(BotKind k) {
  switch (k) {
    case BotKind::Passive: return "passive";
    case BotKind::WorkerRushLike: return "workerRushLike";
    case BotKind::LightRushLike: return "lightRushLike";
    default: return "randomBiased";
  }
}

inline bool bot_kind_from_string(const std::string& s, BotKind& out) {
  for (BotKind k : {BotKind::Passive, BotKind::WorkerRushLike, BotKind::LightRushLike,
                    BotKind::RandomBiased}) {
    if (s == to_string(k)) { out = k; return true; }
  }
  return false;
}

// Approximations of the classic scripted opponents, operating directly at
// the atomic level every tick.
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(BotKind kind, std::uint64_t rng_salt = 0)
      : kind_(kind), salt_(rng_salt) {}

  void begin_episode(Player seat, const GameState& start) override {
    seat_ = seat;
    rng_ = Rng(start.rng_state ^ (salt_ + 0x9e37 + static_cast<std::uint64_t>(seat_index(seat))));
  }

  std::string name() const override { return std::string("bot:") + to_string(kind_); }

  Assignments act(const GameState& s, const Trajectory&) override {
    switch (kind_) {
      case BotKind::Passive: return {};
      case BotKind::WorkerRushLike: return worker_rush(s);
      case BotKind::LightRushLike: return light_rush(s);
      default: return random_biased(s);
    }
  }

 private:
  const Unit* nearest_enemy(const GameState& s, Position from) const {
    const Unit* best = nullptr;
    int best_d = std::numeric_limits<int>::max();
    for (const Unit& u : s.units) {
      if (u.owner != enemy_of(seat_)) continue;
      int d = manhattan(from, u.pos);
      if (d < best_d) {
        best_d = d;
        best = &u;
      }
    }
    return best;
  }

  bool attack_move(const GameState& s, const Unit& u, Assignments& out) const {
    const Unit* target = nearest_enemy(s, u.pos);
    if (target == nullptr) return false;
    if (chebyshev(u.pos, target->pos) <= s.stats.of(u.type).attack_range) {
      out[u.id] = AtomicAction::attack(target->pos);
      return true;
    }
    auto path = pathfind(s, u.pos, target->pos);
    if (path && path->size() >= 2) {
      out[u.id] = AtomicAction::move((*path)[0]);
      return true;
    }
    return false;
  }

  void harvest_duty(const GameState& s, const Unit& w, Assignments& out) const {
    if (w.carrying == 1) {
      for (Dir d : all_dirs) {
        const Unit* t = s.unit_at(neighbor(w.pos, d));
        if (t != nullptr && t->type == UnitType::Base && t->owner == seat_) {
          out[w.id] = AtomicAction::ret(d);
          return;
        }
      }
      for (const Unit& b : s.units)
        if (b.owner == seat_ && b.type == UnitType::Base) {
          auto path = pathfind(s, w.pos, b.pos);
          if (path && path->size() >= 2) out[w.id] = AtomicAction::move((*path)[0]);
          return;
        }
      return;
    }
    for (Dir d : all_dirs) {
      const Unit* t = s.unit_at(neighbor(w.pos, d));
      if (t != nullptr && t->type == UnitType::Mineral && t->resource > 0) {
        out[w.id] = AtomicAction::harvest(d);
        return;
      }
    }
    const Unit* patch = nullptr;
    int best = std::numeric_limits<int>::max();
    for (const Unit& m : s.units) {
      if (m.type != UnitType::Mineral || m.resource <= 0) continue;
      int d = manhattan(w.pos, m.pos);
      if (d < best) {
        best = d;
        patch = &m;
      }
    }
    if (patch != nullptr) {
      auto path = pathfind(s, w.pos, patch->pos);
      if (path && path->size() >= 2) out[w.id] = AtomicAction::move((*path)[0]);
    }
  }

  Assignments worker_rush(const GameState& s) const {
    Assignments out;
    int ledger = s.stock(seat_);
    bool harvester_set = false;
    for (const Unit& u : s.units) {
      if (u.owner != seat_ || !u.idle()) continue;
      if (u.type == UnitType::Base) {
        if (ledger >= s.stats.of(UnitType::Worker).cost) {
          for (Dir d : all_dirs)
            if (s.cell_free(neighbor(u.pos, d))) {
              out[u.id] = AtomicAction::produce(d, UnitType::Worker);
              ledger -= s.stats.of(UnitType::Worker).cost;
              break;
            }
        }
      } else if (u.type == UnitType::Worker) {
        if (!harvester_set) {
          harvester_set = true;
          harvest_duty(s, u, out);
        } else {
          attack_move(s, u, out);
        }
      }
    }
    return out;
  }

  Assignments light_rush(const GameState& s) const {
    Assignments out;
    int ledger = s.stock(seat_);
    const Unit* barracks = nullptr;
    int workers = 0;
    for (const Unit& u : s.units) {
      if (u.owner != seat_) continue;
      if (u.type == UnitType::Barracks) barracks = &u;
      if (u.type == UnitType::Worker) workers++;
    }
    bool building_started = false;
    for (const Unit& u : s.units) {
      if (u.owner == seat_ && u.type == UnitType::Worker && !u.idle() && u.busy &&
          u.busy->action.kind == AtomicAction::Kind::Produce)
        building_started = true;
    }
    bool harvester_set = false;
    for (const Unit& u : s.units) {
      if (u.owner != seat_ || !u.idle()) continue;
      switch (u.type) {
        case UnitType::Base:
          if (workers == 0 && ledger >= s.stats.of(UnitType::Worker).cost) {
            for (Dir d : all_dirs)
              if (s.cell_free(neighbor(u.pos, d))) {
                out[u.id] = AtomicAction::produce(d, UnitType::Worker);
                ledger -= s.stats.of(UnitType::Worker).cost;
                break;
              }
          }
          break;
        case UnitType::Barracks:
          if (ledger >= s.stats.of(UnitType::Light).cost) {
            for (Dir d : all_dirs)
              if (s.cell_free(neighbor(u.pos, d))) {
                out[u.id] = AtomicAction::produce(d, UnitType::Light);
                ledger -= s.stats.of(UnitType::Light).cost;
                break;
              }
          }
          break;
        case UnitType::Worker: {
          int cost = s.stats.of(UnitType::Barracks).cost;
          if (barracks == nullptr && !building_started && ledger >= cost && !harvester_set) {
            // this worker becomes the builder
            Position site = site_for(s);
            Dir d;
            if (detailed_adjacent(u.pos, site, d) && s.cell_free(site)) {
              out[u.id] = AtomicAction::produce(d, UnitType::Barracks);
              ledger -= cost;
            } else {
              auto path = pathfind(s, u.pos, site);
              if (path && path->size() >= 2) out[u.id] = AtomicAction::move((*path)[0]);
            }
            harvester_set = true;  // builder doubles as the economy slot
          } else if (!harvester_set) {
            harvester_set = true;
            harvest_duty(s, u, out);
          } else {
            attack_move(s, u, out);
          }
          break;
        }
        case UnitType::Light:
          attack_move(s, u, out);
          break;
        default: break;
      }
    }
    return out;
  }

  Position site_for(const GameState& s) const {
    // two cells south-east of our base, clamped to the board
    for (const Unit& u : s.units)
      if (u.owner == seat_ && u.type == UnitType::Base) {
        int dx = seat_ == Player::P1 ? 2 : -2;
        Position p{std::clamp(u.pos.x + dx, 0, s.width - 1),
                   std::clamp(u.pos.y, 0, s.height - 1)};
        if (s.cell_free(p)) return p;
        for (Dir d : all_dirs)
          if (s.cell_free(neighbor(p, d))) return neighbor(p, d);
      }
    return {s.width / 2, s.height / 2};
  }

  static bool detailed_adjacent(Position from, Position to, Dir& out) {
    for (Dir d : all_dirs)
      if (neighbor(from, d) == to) {
        out = d;
        return true;
      }
    return false;
  }

  Assignments random_biased(const GameState& s) {
    Assignments out;
    std::array<int, 2> ledger = s.resources;
    for (const Unit& u : s.units) {
      if (u.owner != seat_ || !u.idle()) continue;
      auto acts = legal_actions(s, u.id);
      std::vector<AtomicAction> attacks, gather, rest;
      for (const AtomicAction& a : acts) {
        if (a.kind == AtomicAction::Kind::Attack) attacks.push_back(a);
        else if (a.kind == AtomicAction::Kind::Harvest || a.kind == AtomicAction::Kind::Return)
          gather.push_back(a);
        else rest.push_back(a);
      }
      const std::vector<AtomicAction>& pool =
          !attacks.empty() ? attacks : (!gather.empty() ? gather : rest);
      AtomicAction pick = pool[static_cast<std::size_t>(rng_.below(pool.size()))];
      int& stock = ledger[seat_index(seat_)];
      if (!action_legal(s, u, pick, stock)) pick = AtomicAction::noop();
      if (pick.kind == AtomicAction::Kind::Produce) stock -= s.stats.of(pick.produce_type).cost;
      out[u.id] = pick;
    }
    return out;
  }

  BotKind kind_;
  std::uint64_t salt_;
  Player seat_ = Player::P1;
  Rng rng_{0};
};

}  // namespace sap
