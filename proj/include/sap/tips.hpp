#pragma once

#include <string>
#include <vector>

#include "sap/engine.hpp"
#include "sap/strategy.hpp"

namespace sap {

enum class StrategyDim : std::uint8_t {
  Economy, Barracks, Composition, Aggression, AttackTarget, Defense
};

inline const char* to_string(StrategyDim d) {
  switch (d) {
    case StrategyDim::Economy: return "economy";
    case StrategyDim::Barracks: return "barracks";
    case StrategyDim::Composition: return "composition";
    case StrategyDim::Aggression: return "aggression";
    case StrategyDim::AttackTarget: return "attack_target";
    default: return "defense";
  }
}

inline int dim_value(const Strategy& s, StrategyDim d) {
  switch (d) {
    case StrategyDim::Economy: return static_cast<int>(s.economy);
    case StrategyDim::Barracks: return static_cast<int>(s.barracks);
    case StrategyDim::Composition: return static_cast<int>(s.composition);
    case StrategyDim::Aggression: return s.aggression ? 1 : 0;
    case StrategyDim::AttackTarget: return static_cast<int>(s.attack_target);
    default: return static_cast<int>(s.defense);
  }
}

// A tip couples a human-readable directive (rendered into prompts) with a
// machine effect the rule planner applies after the base strategy mapping.
struct ExpertTip {
  struct Effect {
    enum class Kind : std::uint8_t {
      HarvestWorkerCount,    // set HarvestMineral.worker_count = amount
      AddProduce,            // append amount ProduceUnit{type} entries
      AddAttackAny,          // append amount AttackEnemy{primary type, Any} entries
      CapAttack,             // keep at most amount AttackEnemy entries
      CapBuild,              // keep at most amount BuildBuilding entries
      EnsureBuild,           // guarantee one BuildBuilding{Barracks} while none stands
      CapDeploy,             // keep at most amount DeployUnit entries
      EnsureDeploy,          // guarantee amount ring-guard DeployUnit entries
      PreferAttackTarget,    // retarget preferred AttackEnemy entries
    };
    Kind kind;
    int amount = 0;
    UnitType type = UnitType::Worker;
    bool target_any = false;
  };

  StrategyDim dim = StrategyDim::Economy;
  int value = 0;
  std::string directive;
  std::vector<Effect> effects;

  bool matches(const Strategy& s) const { return dim_value(s, dim) == value; }
};

// The default tip set: one tip per (dimension, value) pair. Within each
// dimension the entry an unconditional consumer should end up with sits last
// (apply-all consumers resolve per-dimension conflicts by last-wins).
inline const std::vector<ExpertTip>& default_tips() {
  static const std::vector<ExpertTip> tips = [] {
    using E = ExpertTip::Effect;
    using K = ExpertTip::Effect::Kind;
    std::vector<ExpertTip> t;

    t.push_back({StrategyDim::Economy, static_cast<int>(Economy::Low),
                 "Low economy: keep a single worker harvesting and commit everything else to the field.",
                 {E{K::HarvestWorkerCount, 1, UnitType::Worker, false}}});
    t.push_back({StrategyDim::Economy, static_cast<int>(Economy::Med),
                 "Medium economy: keep two workers cycling minerals before expanding the army.",
                 {E{K::HarvestWorkerCount, 2, UnitType::Worker, false}}});
    t.push_back({StrategyDim::Economy, static_cast<int>(Economy::High),
                 "High economy: dedicate three workers to the mineral line and bank for production.",
                 {E{K::HarvestWorkerCount, 3, UnitType::Worker, false}}});

    t.push_back({StrategyDim::Barracks, static_cast<int>(BarracksTiming::None),
                 "No barracks: skip BuildBuilding entirely and fight with workers.",
                 {E{K::CapBuild, 0, UnitType::Barracks, false}}});
    t.push_back({StrategyDim::Barracks, static_cast<int>(BarracksTiming::Late),
                 "Late barracks: queue at most one BuildBuilding and only once the bank can absorb it.",
                 {E{K::CapBuild, 1, UnitType::Barracks, false}}});
    t.push_back({StrategyDim::Barracks, static_cast<int>(BarracksTiming::Early),
                 "Early barracks: get a BuildBuilding[Barracks] into the plan as soon as it is affordable.",
                 {E{K::EnsureBuild, 1, UnitType::Barracks, false}}});

    t.push_back({StrategyDim::Composition, static_cast<int>(Composition::Worker),
                 "Worker composition: add extra ProduceUnit[Worker] entries for army bodies.",
                 {E{K::AddProduce, 1, UnitType::Worker, false}}});
    t.push_back({StrategyDim::Composition, static_cast<int>(Composition::Heavy),
                 "Heavy composition: add another ProduceUnit[Heavy]; they carry fights despite the cost.",
                 {E{K::AddProduce, 1, UnitType::Heavy, false}}});
    t.push_back({StrategyDim::Composition, static_cast<int>(Composition::Ranged),
                 "Ranged composition: add another ProduceUnit[Ranged] and keep them massed.",
                 {E{K::AddProduce, 1, UnitType::Ranged, false}}});
    t.push_back({StrategyDim::Composition, static_cast<int>(Composition::Mixed),
                 "Mixed composition: round out the army with an extra ProduceUnit[Light].",
                 {E{K::AddProduce, 1, UnitType::Light, false}}});
    t.push_back({StrategyDim::Composition, static_cast<int>(Composition::Light),
                 "Light composition: add another ProduceUnit[Light]; speed and numbers win early fights.",
                 {E{K::AddProduce, 1, UnitType::Light, false}}});

    t.push_back({StrategyDim::Aggression, 0,
                 "Aggression off: plan no AttackEnemy entries; hold ground and let defenders answer.",
                 {E{K::CapAttack, 0, UnitType::Worker, false}}});
    t.push_back({StrategyDim::Aggression, 1,
                 "Aggression on: plan more AttackEnemy entries, including a catch-all with target Any.",
                 {E{K::AddAttackAny, 1, UnitType::Worker, false}}});

    t.push_back({StrategyDim::AttackTarget, static_cast<int>(AttackTarget::Workers),
                 "Target workers: point AttackEnemy at enemy Workers to starve their economy first.",
                 {E{K::PreferAttackTarget, 0, UnitType::Worker, false}}});
    t.push_back({StrategyDim::AttackTarget, static_cast<int>(AttackTarget::Buildings),
                 "Target buildings: point AttackEnemy at the enemy Base to force the win condition.",
                 {E{K::PreferAttackTarget, 0, UnitType::Base, false}}});
    t.push_back({StrategyDim::AttackTarget, static_cast<int>(AttackTarget::Closest),
                 "Target closest: leave AttackEnemy on target Any and take the nearest fight.",
                 {E{K::PreferAttackTarget, 0, UnitType::Worker, true}}});

    t.push_back({StrategyDim::Defense, static_cast<int>(DefensePosture::None),
                 "No defense: skip DeployUnit garrisons; every unit is forward value.",
                 {E{K::CapDeploy, 0, UnitType::Worker, false}}});
    t.push_back({StrategyDim::Defense, static_cast<int>(DefensePosture::Full),
                 "Full defense: keep four DeployUnit guards ringed around the base.",
                 {E{K::EnsureDeploy, 4, UnitType::Worker, false}}});
    t.push_back({StrategyDim::Defense, static_cast<int>(DefensePosture::Perimeter),
                 "Perimeter defense: keep two DeployUnit guards between the base and the enemy.",
                 {E{K::EnsureDeploy, 2, UnitType::Worker, false}}});

    return t;
  }();
  return tips;
}

}  // namespace sap
