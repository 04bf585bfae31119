#pragma once

#include <functional>

#include "sap/strategy.hpp"
#include "sap/trajectory.hpp"

namespace sap {

// Threshold defaults were tuned against the rule planner's observable
// behavior on the default stat table; re-derive them if the stats change.
struct RecognitionConfig {
  int barracks_early_max_tick = 600;
  double aggr_enemy_frac = 0.15;        // enemy-half occupancy that flags aggression
  int aggr_enemy_attacks_min = 3;       // or this many attacks launched from enemy ground
  double defense_full_frac = 0.90;      // own-half occupancy thresholds
  double defense_perimeter_frac = 0.60;
  double econ_low_max = 1.35;           // estimated concurrent harvesters
  double econ_med_max = 2.25;
  int nominal_cycle_ticks = 30;         // harvest + deposit at point blank range
  double comp_majority = 0.5;           // strict majority, else mixed
};

struct Recognized {
  Strategy strategy;
  std::array<double, 6> confidence{};  // per dimension, [0,1]
};

using RecognizerPort = std::function<Recognized(const PlayerSummary&)>;

namespace detail {

inline double margin_conf(double value, double threshold, double scale) {
  double m = (value - threshold) / scale;
  if (m < 0) m = -m;
  return m > 1.0 ? 1.0 : m;
}

}  // namespace detail

// Rule-based strategy recognition from one player's behavior digest. Each
// dimension reads its own statistic; confidence is the normalized margin of
// the deciding comparison. An empty digest maps to the all-first strategy at
// zero confidence.
inline Recognized recognize(const PlayerSummary& s, const RecognitionConfig& cfg = {}) {
  Recognized out;
  out.strategy = k_neutral_strategy;
  if (s.ticks_observed <= 0) return out;

  // economy: estimated concurrently-harvesting workers
  double est = static_cast<double>(s.harvest_count) * cfg.nominal_cycle_ticks /
               static_cast<double>(s.ticks_observed);
  if (est < cfg.econ_low_max) {
    out.strategy.economy = Economy::Low;
    out.confidence[0] = detail::margin_conf(est, cfg.econ_low_max, 1.0);
  } else if (est < cfg.econ_med_max) {
    out.strategy.economy = Economy::Med;
    out.confidence[0] =
        std::min(detail::margin_conf(est, cfg.econ_low_max, 1.0),
                 detail::margin_conf(est, cfg.econ_med_max, 1.0));
  } else {
    out.strategy.economy = Economy::High;
    out.confidence[0] = detail::margin_conf(est, cfg.econ_med_max, 1.0);
  }

  // barracks timing
  if (!s.barracks_completed_tick) {
    out.strategy.barracks = BarracksTiming::None;
    out.confidence[1] = s.ticks_observed > cfg.barracks_early_max_tick ? 1.0 : 0.5;
  } else if (*s.barracks_completed_tick <= cfg.barracks_early_max_tick) {
    out.strategy.barracks = BarracksTiming::Early;
    out.confidence[1] = detail::margin_conf(*s.barracks_completed_tick,
                                            cfg.barracks_early_max_tick,
                                            cfg.barracks_early_max_tick);
  } else {
    out.strategy.barracks = BarracksTiming::Late;
    out.confidence[1] = detail::margin_conf(*s.barracks_completed_tick,
                                            cfg.barracks_early_max_tick,
                                            cfg.barracks_early_max_tick);
  }

  // composition: strict majority among produced combat units
  int light = s.produced(UnitType::Light);
  int heavy = s.produced(UnitType::Heavy);
  int ranged = s.produced(UnitType::Ranged);
  int combat = light + heavy + ranged;
  if (out.strategy.barracks == BarracksTiming::None || combat == 0) {
    out.strategy.composition = Composition::Worker;
    out.confidence[2] = out.strategy.barracks == BarracksTiming::None ? out.confidence[1] : 0.25;
  } else {
    int top = std::max({light, heavy, ranged});
    double share = static_cast<double>(top) / static_cast<double>(combat);
    if (share > cfg.comp_majority) {
      out.strategy.composition = top == light   ? Composition::Light
                                 : top == heavy ? Composition::Heavy
                                                : Composition::Ranged;
    } else {
      out.strategy.composition = Composition::Mixed;
    }
    out.confidence[2] = detail::margin_conf(share, cfg.comp_majority, 0.5);
  }

  // aggression: fighting plus presence across the midline
  bool aggr = s.attack_count > 0 &&
              (s.enemy_half_fraction > cfg.aggr_enemy_frac ||
               s.attacks_in_enemy_half >= cfg.aggr_enemy_attacks_min);
  out.strategy.aggression = aggr;
  if (s.attack_count == 0) {
    out.confidence[3] = s.ticks_observed > 200 ? 0.8 : 0.3;
  } else if (s.attacks_in_enemy_half >= cfg.aggr_enemy_attacks_min) {
    out.confidence[3] = 1.0;
  } else {
    out.confidence[3] = detail::margin_conf(s.enemy_half_fraction, cfg.aggr_enemy_frac,
                                            cfg.aggr_enemy_frac);
  }

  // attack target preference: modal victim type
  {
    int workers = s.victim_type_count[static_cast<std::size_t>(UnitType::Worker)];
    int buildings = s.victim_type_count[static_cast<std::size_t>(UnitType::Base)] +
                    s.victim_type_count[static_cast<std::size_t>(UnitType::Barracks)];
    int rest = s.attack_count - workers - buildings;
    if (workers > buildings && workers > rest) {
      out.strategy.attack_target = AttackTarget::Workers;
      out.confidence[4] = static_cast<double>(workers) / std::max(1, s.attack_count);
    } else if (buildings > workers && buildings > rest) {
      out.strategy.attack_target = AttackTarget::Buildings;
      out.confidence[4] = static_cast<double>(buildings) / std::max(1, s.attack_count);
    } else {
      out.strategy.attack_target = AttackTarget::Closest;
      out.confidence[4] = s.attack_count == 0 ? 0.0 : static_cast<double>(rest) / s.attack_count;
    }
  }

  // defense posture: how much of the force stays home
  if (s.own_half_fraction >= cfg.defense_full_frac) {
    out.strategy.defense = DefensePosture::Full;
    out.confidence[5] = detail::margin_conf(s.own_half_fraction, cfg.defense_full_frac,
                                            1.0 - cfg.defense_full_frac);
  } else if (s.own_half_fraction >= cfg.defense_perimeter_frac) {
    out.strategy.defense = DefensePosture::Perimeter;
    out.confidence[5] = std::min(
        detail::margin_conf(s.own_half_fraction, cfg.defense_perimeter_frac, 0.15),
        detail::margin_conf(s.own_half_fraction, cfg.defense_full_frac, 0.15));
  } else {
    out.strategy.defense = DefensePosture::None;
    out.confidence[5] = detail::margin_conf(s.own_half_fraction, cfg.defense_perimeter_frac,
                                            cfg.defense_perimeter_frac);
  }

  // keep the estimate inside the valid space
  if (out.strategy.composition != Composition::Worker &&
      out.strategy.barracks == BarracksTiming::None)
    out.strategy.barracks = BarracksTiming::Early;

  for (double& c : out.confidence) c = std::clamp(c, 0.0, 1.0);
  return out;
}

inline RecognizerPort rule_recognizer_port(RecognitionConfig cfg = {}) {
  return [cfg](const PlayerSummary& s) { return recognize(s, cfg); };
}

}  // namespace sap
