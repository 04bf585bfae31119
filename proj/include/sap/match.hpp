#pragma once

#include <memory>
#include <ostream>

#include "sap/agents.hpp"
#include "sap/event_log.hpp"

namespace sap {

struct AgentSpec {
  enum class Kind : std::uint8_t {
    Sap, SapEpe, SapNoSen, SapNoTips, Fixed, Vanilla, TipsAugmented, Bot
  };
  Kind kind = Kind::Vanilla;
  Strategy fixed;               // Kind::Fixed
  BotKind bot = BotKind::Passive;  // Kind::Bot

  static AgentSpec sap() { return {Kind::Sap, {}, BotKind::Passive}; }
  static AgentSpec sap_epe() { return {Kind::SapEpe, {}, BotKind::Passive}; }
  static AgentSpec sap_nosen() { return {Kind::SapNoSen, {}, BotKind::Passive}; }
  static AgentSpec sap_notips() { return {Kind::SapNoTips, {}, BotKind::Passive}; }
  static AgentSpec fixed_strategy(Strategy s) { return {Kind::Fixed, s, BotKind::Passive}; }
  static AgentSpec vanilla() { return {Kind::Vanilla, {}, BotKind::Passive}; }
  static AgentSpec tips_augmented() { return {Kind::TipsAugmented, {}, BotKind::Passive}; }
  static AgentSpec scripted(BotKind k) { return {Kind::Bot, {}, k}; }
};

inline std::string to_string(const AgentSpec& spec) {
  switch (spec.kind) {
    case AgentSpec::Kind::Sap: return "sap";
    case AgentSpec::Kind::SapEpe: return "sap-epe";
    case AgentSpec::Kind::SapNoSen: return "sap-nosen";
    case AgentSpec::Kind::SapNoTips: return "sap-notips";
    case AgentSpec::Kind::Fixed: return "fixed:" + strategy_to_string(spec.fixed);
    case AgentSpec::Kind::Vanilla: return "vanilla";
    case AgentSpec::Kind::TipsAugmented: return "tips-augmented";
    default: return std::string("bot:") + to_string(spec.bot);
  }
}

inline std::optional<AgentSpec> agent_spec_from_string(const std::string& text) {
  if (text == "sap") return AgentSpec::sap();
  if (text == "sap-epe") return AgentSpec::sap_epe();
  if (text == "sap-nosen") return AgentSpec::sap_nosen();
  if (text == "sap-notips") return AgentSpec::sap_notips();
  if (text == "vanilla") return AgentSpec::vanilla();
  if (text == "tips" || text == "tips-augmented") return AgentSpec::tips_augmented();
  if (text.rfind("fixed:", 0) == 0) {
    auto s = strategy_from_string(text.substr(6));
    if (!s) return std::nullopt;
    return AgentSpec::fixed_strategy(*s);
  }
  if (text.rfind("bot:", 0) == 0) {
    BotKind k;
    if (!bot_kind_from_string(text.substr(4), k)) return std::nullopt;
    return AgentSpec::scripted(k);
  }
  return std::nullopt;
}

// Immutable shared inputs agents are built from. The port overrides let a
// remote text-generation adapter stand in for the rule planner/recognizer.
struct MatchAssets {
  const SENParams* sen = nullptr;
  std::vector<ExpertTip> tips = default_tips();
  PlannerConfig planner_cfg{};
  RecognitionConfig recog_cfg{};
  int plan_interval = 200;
  PlannerPort planner_override;        // empty: rule planner
  RecognizerPort recognizer_override;  // empty: rule recognizer
};

inline std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const MatchAssets& assets) {
  PlannerPort planner =
      assets.planner_override ? assets.planner_override : rule_planner_port(assets.planner_cfg);
  RecognizerPort recognizer = assets.recognizer_override ? assets.recognizer_override
                                                         : rule_recognizer_port(assets.recog_cfg);
  switch (spec.kind) {
    case AgentSpec::Kind::Sap:
      return std::make_unique<SapAgent>(assets.sen, recognizer, planner, assets.tips,
                                        assets.plan_interval, SapMode::Full);
    case AgentSpec::Kind::SapEpe:
      return std::make_unique<SapAgent>(assets.sen, recognizer, planner, assets.tips,
                                        assets.plan_interval, SapMode::PerEpisode);
    case AgentSpec::Kind::SapNoSen:
      return std::make_unique<SapAgent>(assets.sen, recognizer, planner, assets.tips,
                                        assets.plan_interval, SapMode::NoSen);
    case AgentSpec::Kind::SapNoTips:
      return std::make_unique<SapAgent>(assets.sen, recognizer, planner, assets.tips,
                                        assets.plan_interval, SapMode::NoTips);
    case AgentSpec::Kind::Fixed:
      return std::make_unique<FixedStrategyAgent>(spec.fixed, planner, assets.tips,
                                                  assets.plan_interval);
    case AgentSpec::Kind::Vanilla:
      return std::make_unique<VanillaAgent>(planner, assets.plan_interval);
    case AgentSpec::Kind::TipsAugmented:
      return std::make_unique<TipsAugmentedAgent>(assets.tips, assets.plan_interval,
                                                  assets.planner_cfg);
    default:
      return std::make_unique<ScriptedAgent>(spec.bot);
  }
}

struct PlayerMetrics {
  int damage_dealt = 0;
  int damage_taken = 0;
  int resources_harvested = 0;  // minerals deposited
  int units_produced = 0;
};

inline constexpr int k_histogram_bucket_ticks = 100;

struct MatchResult {
  Outcome outcome;
  int final_tick = 0;
  std::array<PlayerMetrics, 2> metrics{};
  // [seat][bucket][atomic action kind] -> issued count
  std::array<std::vector<std::array<int, 6>>, 2> action_histogram;
  // [seat][bucket] -> {damage dealt, damage taken, resources harvested, units produced}
  std::array<std::vector<std::array<int, 4>>, 2> metric_series;
  std::array<std::vector<ReplanEvent>, 2> replans;
  TrajectorySummary summary;  // both players' behavior digest

  double score(Player seat) const {
    if (outcome.kind == Outcome::Kind::Draw) return 0.5;
    if (outcome.kind == Outcome::Kind::Win) return outcome.winner == seat ? 1.0 : 0.0;
    return 0.5;
  }
};

struct MatchConfig {
  MapId map = MapId::basesWorkers8x8;
  std::uint64_t seed = 0;
  int step_limit = 0;  // 0: map default
  std::array<AgentSpec, 2> agents{AgentSpec::vanilla(), AgentSpec::vanilla()};
  std::ostream* event_log = nullptr;
  StatsTable stats{};
};

namespace detail {

inline void bucket_issued(MatchResult& result, int seat, int tick, const Assignments& issued) {
  auto& hist = result.action_histogram[static_cast<std::size_t>(seat)];
  std::size_t bucket = static_cast<std::size_t>(tick / k_histogram_bucket_ticks);
  while (hist.size() <= bucket) hist.push_back({});
  for (const auto& [uid, action] : issued)
    hist[bucket][static_cast<std::size_t>(action.kind)]++;
}

inline std::array<int, 4>& metric_bucket(MatchResult& result, int seat, int tick) {
  auto& series = result.metric_series[static_cast<std::size_t>(seat)];
  std::size_t bucket = static_cast<std::size_t>(tick / k_histogram_bucket_ticks);
  while (series.size() <= bucket) series.push_back({});
  return series[bucket];
}

}  // namespace detail

// Drives one complete episode. Agents may keep state across episodes
// (per-episode exploitation); pass the same instances through `reuse`.
struct AgentPair {
  Agent* p1 = nullptr;
  Agent* p2 = nullptr;
};

inline MatchResult run_match_with(const MatchConfig& cfg, AgentPair agents) {
  GameState state = load_map(cfg.map, cfg.seed, cfg.stats);
  if (cfg.step_limit > 0) state.step_limit = cfg.step_limit;

  agents.p1->begin_episode(Player::P1, state);
  agents.p2->begin_episode(Player::P2, state);

  MatchResult result;
  Trajectory traj;
  StepEvents ev;

  while (!outcome(state).over()) {
    Assignments a1 = agents.p1->act(state, traj);
    Assignments a2 = agents.p2->act(state, traj);
    traj.record(state, a1, a2);
    detail::bucket_issued(result, 0, state.tick, a1);
    detail::bucket_issued(result, 1, state.tick, a2);

    GameState pre = cfg.event_log != nullptr ? state : GameState{};
    Assignments merged = a1;
    merged.insert(a2.begin(), a2.end());
    step_inplace(state, merged, &ev);
    if (cfg.event_log != nullptr) write_event_log_tick(*cfg.event_log, pre, a1, a2, &ev);

    int done_tick = state.tick - 1;
    for (const auto& at : ev.attacks) {
      int seat = seat_index(at.attacker_owner);
      result.metrics[static_cast<std::size_t>(seat)].damage_dealt += at.damage;
      result.metrics[static_cast<std::size_t>(1 - seat)].damage_taken += at.damage;
      detail::metric_bucket(result, seat, done_tick)[0] += at.damage;
      detail::metric_bucket(result, 1 - seat, done_tick)[1] += at.damage;
    }
    for (const auto& sp : ev.spawns) {
      result.metrics[static_cast<std::size_t>(seat_index(sp.owner))].units_produced++;
      detail::metric_bucket(result, seat_index(sp.owner), done_tick)[3]++;
    }
    for (int uid : ev.return_completed) {
      const Unit* u = state.find_unit(uid);
      if (u != nullptr) {
        result.metrics[static_cast<std::size_t>(seat_index(u->owner))].resources_harvested++;
        detail::metric_bucket(result, seat_index(u->owner), done_tick)[2]++;
      }
    }
  }

  result.outcome = outcome(state);
  result.final_tick = state.tick;
  result.summary = traj.extract();
  agents.p1->end_episode(traj);
  agents.p2->end_episode(traj);
  if (const auto* e1 = agents.p1->replan_events()) result.replans[0] = *e1;
  if (const auto* e2 = agents.p2->replan_events()) result.replans[1] = *e2;
  return result;
}

inline MatchResult run_match(const MatchConfig& cfg, const MatchAssets& assets) {
  std::unique_ptr<Agent> p1 = make_agent(cfg.agents[0], assets);
  std::unique_ptr<Agent> p2 = make_agent(cfg.agents[1], assets);
  return run_match_with(cfg, {p1.get(), p2.get()});
}

}  // namespace sap
