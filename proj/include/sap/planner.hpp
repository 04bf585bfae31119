#pragma once

#include <algorithm>
#include <functional>
#include <sstream>

#include "sap/plan.hpp"
#include "sap/strategy.hpp"
#include "sap/tips.hpp"

namespace sap {

struct PlannerConfig {
  int plan_entry_cap = 12;
  bool tips_unconditional = false;  // apply every tip, last-wins per dimension
};

// A planner port turns (observation, strategy, tips) into a plan. The rule
// planner below is the default; a remote adapter can stand behind the same
// signature with this as its fallback.
using PlannerPort =
    std::function<Plan(const GameState&, Player, const Strategy&, const std::vector<ExpertTip>&)>;

namespace detail {

inline std::vector<UnitType> fielded_types(Composition c) {
  switch (c) {
    case Composition::Worker: return {UnitType::Worker};
    case Composition::Light: return {UnitType::Light};
    case Composition::Heavy: return {UnitType::Heavy};
    case Composition::Ranged: return {UnitType::Ranged};
    default: return {UnitType::Light, UnitType::Heavy, UnitType::Ranged};
  }
}

inline const Unit* own_base(const GameState& s, Player me) {
  for (const Unit& u : s.units)
    if (u.owner == me && u.type == UnitType::Base) return &u;
  return nullptr;
}

inline const Unit* enemy_base(const GameState& s, Player me) {
  for (const Unit& u : s.units)
    if (u.owner == enemy_of(me) && u.type == UnitType::Base) return &u;
  return nullptr;
}

inline bool next_to_mineral(const GameState& s, Position p) {
  for (Dir d : all_dirs) {
    const Unit* u = s.unit_at(neighbor(p, d));
    if (u != nullptr && u->type == UnitType::Mineral) return true;
  }
  return false;
}

// Seat-mirrored view of a cell, so both players make reflected decisions and
// neither seat gets a geometric edge from tie-breaking.
inline Position canon(const GameState& s, Player me, Position p) {
  return me == Player::P2 ? Position{s.width - 1 - p.x, s.height - 1 - p.y} : p;
}

// deterministic barracks site: nearest free cell to the base that blocks
// neither a harvest spot nor a production exit, tucked away from the enemy
inline Position pick_build_site(const GameState& s, Player me) {
  const Unit* base = own_base(s, me);
  Position anchor = base != nullptr ? base->pos : Position{s.width / 2, s.height / 2};
  const Unit* foe = enemy_base(s, me);
  Position threat = foe != nullptr ? foe->pos : Position{s.width / 2, s.height / 2};
  Position best = anchor;
  long best_key = std::numeric_limits<long>::max();
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      Position p{x, y};
      if (!s.cell_free(p)) continue;
      int d = manhattan(p, anchor);
      if (d < 2) continue;  // keep production exits open
      if (next_to_mineral(s, p)) continue;
      Position c = canon(s, me, p);
      long key = d * 1000000L + (2 * (s.width + s.height) - manhattan(p, threat)) * 10000L +
                 c.y * 100L + c.x;
      if (key < best_key) {
        best_key = key;
        best = p;
      }
    }
  return best;
}

// guard posts: free cells two rings out from the base, the ones facing the
// enemy first, always strictly inside our half
inline std::vector<Position> ring_sites(const GameState& s, Player me, int count) {
  const Unit* base = own_base(s, me);
  if (base == nullptr || count <= 0) return {};
  const Unit* target = enemy_base(s, me);
  Position toward = target != nullptr ? target->pos : Position{s.width / 2, s.height / 2};
  int mid = (s.width + s.height - 2) / 2;
  std::vector<Position> cells;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      Position p{x, y};
      if (chebyshev(p, base->pos) != 2 || !s.cell_free(p)) continue;
      // stand clear of the border so opposing garrisons don't trade shots
      if (me == Player::P1 ? p.x + p.y > mid - 2 : p.x + p.y < mid + 2) continue;
      cells.push_back(p);
    }
  std::sort(cells.begin(), cells.end(), [&](Position a, Position b) {
    int da = manhattan(a, toward), db = manhattan(b, toward);
    if (da != db) return da < db;
    Position ca = canon(s, me, a), cb = canon(s, me, b);
    if (ca.y != cb.y) return ca.y < cb.y;
    return ca.x < cb.x;
  });
  if (static_cast<int>(cells.size()) > count) cells.resize(static_cast<std::size_t>(count));
  return cells;
}

inline Dir spawn_dir_for(Player me) { return me == Player::P2 ? Dir::N : Dir::S; }

inline std::optional<UnitType> preferred_target(AttackTarget t) {
  switch (t) {
    case AttackTarget::Workers: return UnitType::Worker;
    case AttackTarget::Buildings: return UnitType::Base;
    default: return std::nullopt;
  }
}

inline int count_kind(const Plan& p, AbstractAction::Kind k) {
  int n = 0;
  for (const auto& e : p.entries)
    if (e.kind == k) n++;
  return n;
}

inline void cap_kind(Plan& p, AbstractAction::Kind k, int cap) {
  int kept = 0;
  std::vector<AbstractAction> out;
  for (const auto& e : p.entries) {
    if (e.kind == k && kept >= cap) continue;
    if (e.kind == k) kept++;
    out.push_back(e);
  }
  p.entries = std::move(out);
}

// insert after the last entry of `kind`, or before the first deploy, or at
// the end; keeps plan ordering stable and readable
inline void insert_grouped(Plan& p, AbstractAction entry, AbstractAction::Kind kind) {
  auto it = p.entries.end();
  for (auto cur = p.entries.begin(); cur != p.entries.end(); ++cur)
    if (cur->kind == kind) it = cur + 1;
  if (it == p.entries.end()) {
    for (auto cur = p.entries.begin(); cur != p.entries.end(); ++cur)
      if (cur->kind == AbstractAction::Kind::DeployUnit) {
        it = cur;
        break;
      }
  }
  p.entries.insert(it, entry);
}

struct TipContext {
  UnitType primary = UnitType::Worker;
  std::vector<UnitType> fielded{UnitType::Worker};
  std::vector<Position> spare_ring;
  Position build_site{};
  Dir spawn_dir = Dir::S;
  bool barracks_standing = false;
};

inline void apply_effect(Plan& plan, const ExpertTip::Effect& e, const TipContext& ctx) {
  using K = ExpertTip::Effect::Kind;
  switch (e.kind) {
    case K::HarvestWorkerCount:
      for (auto& entry : plan.entries)
        if (entry.kind == AbstractAction::Kind::HarvestMineral) entry.worker_count = e.amount;
      break;
    case K::AddProduce:
      for (int i = 0; i < e.amount; ++i)
        insert_grouped(plan, AbstractAction::produce(e.type, ctx.spawn_dir),
                       AbstractAction::Kind::ProduceUnit);
      break;
    case K::AddAttackAny:
      // one catch-all wave per fielded unit type
      for (int i = 0; i < e.amount; ++i)
        for (UnitType t : ctx.fielded)
          insert_grouped(plan, AbstractAction::attack(t, std::nullopt),
                         AbstractAction::Kind::AttackEnemy);
      break;
    case K::CapAttack:
      cap_kind(plan, AbstractAction::Kind::AttackEnemy, e.amount);
      break;
    case K::CapBuild:
      cap_kind(plan, AbstractAction::Kind::BuildBuilding, e.amount);
      break;
    case K::EnsureBuild:
      if (!ctx.barracks_standing &&
          count_kind(plan, AbstractAction::Kind::BuildBuilding) == 0)
        plan.entries.insert(plan.entries.begin(),
                            AbstractAction::build(UnitType::Barracks, ctx.build_site));
      break;
    case K::CapDeploy:
      cap_kind(plan, AbstractAction::Kind::DeployUnit, e.amount);
      break;
    case K::EnsureDeploy: {
      int have = count_kind(plan, AbstractAction::Kind::DeployUnit);
      std::size_t next = 0;
      while (have < e.amount && next < ctx.spare_ring.size()) {
        plan.entries.push_back(AbstractAction::deploy(ctx.primary, ctx.spare_ring[next++]));
        have++;
      }
      break;
    }
    case K::PreferAttackTarget:
      for (auto& entry : plan.entries)
        if (entry.kind == AbstractAction::Kind::AttackEnemy && !entry.target_any) {
          entry.target_any = e.target_any;
          if (!e.target_any) entry.target_type = e.type;
        }
      break;
  }
}

}  // namespace detail

// Deterministic strategy-to-plan mapping. Emits, in priority order: the
// barracks build, the mineral line, unit production, attack waves, then
// guard posts; tip effects land last. Entry budget respects cfg.plan_entry_cap
// with lowest-priority entries dropped first.
inline Plan rule_plan(const GameState& obs, Player me, const Strategy& s,
                      const std::vector<ExpertTip>& tips, const PlannerConfig& cfg = {}) {
  Plan plan;
  plan.created_tick = obs.tick;

  std::vector<UnitType> fielded = detail::fielded_types(s.composition);
  UnitType primary = fielded[0];
  int w_target = 1 + static_cast<int>(s.economy);

  int own_workers = 0, own_barracks = 0;
  for (const Unit& u : obs.units) {
    if (u.owner != me) continue;
    if (u.type == UnitType::Worker) own_workers++;
    if (u.type == UnitType::Barracks) own_barracks++;
  }

  Position site = detail::pick_build_site(obs, me);
  if (s.barracks != BarracksTiming::None && own_barracks == 0) {
    int cost = obs.stats.of(UnitType::Barracks).cost;
    bool emit = s.barracks == BarracksTiming::Early || obs.stock(me) >= cost + 3;
    if (emit) plan.entries.push_back(AbstractAction::build(UnitType::Barracks, site));
  }

  plan.entries.push_back(AbstractAction::harvest(w_target));

  Dir spawn_dir = detail::spawn_dir_for(me);
  if (s.composition != Composition::Worker) {
    for (UnitType t : fielded)
      plan.entries.push_back(AbstractAction::produce(t, spawn_dir));
  } else if (s.aggression) {
    plan.entries.push_back(AbstractAction::produce(UnitType::Worker, spawn_dir));
  }

  if (s.aggression) {
    std::optional<UnitType> victim = detail::preferred_target(s.attack_target);
    plan.entries.push_back(AbstractAction::attack(primary, victim));
  }

  // the base mapping fields half the garrison; the defense tips bring the
  // ring up to full strength
  int n_guards = static_cast<int>(s.defense);
  std::vector<Position> ring = detail::ring_sites(obs, me, 8);
  for (int i = 0; i < n_guards && i < static_cast<int>(ring.size()); ++i)
    plan.entries.push_back(AbstractAction::deploy(primary, ring[static_cast<std::size_t>(i)]));

  detail::TipContext ctx;
  ctx.primary = primary;
  ctx.fielded = fielded;
  ctx.build_site = site;
  ctx.spawn_dir = spawn_dir;
  ctx.barracks_standing = own_barracks > 0;
  for (std::size_t i = static_cast<std::size_t>(std::min<int>(n_guards, static_cast<int>(ring.size())));
       i < ring.size(); ++i)
    ctx.spare_ring.push_back(ring[i]);

  if (cfg.tips_unconditional) {
    // one tip per dimension, last in the list wins
    std::array<const ExpertTip*, 6> pick{};
    for (const ExpertTip& t : tips) pick[static_cast<std::size_t>(t.dim)] = &t;
    for (const ExpertTip* t : pick)
      if (t != nullptr)
        for (const auto& e : t->effects) detail::apply_effect(plan, e, ctx);
  } else {
    for (const ExpertTip& t : tips)
      if (t.matches(s))
        for (const auto& e : t.effects) detail::apply_effect(plan, e, ctx);
  }

  // top up the mineral line and guard posts with workers
  int wanted = 0;
  for (const auto& e : plan.entries) {
    if (e.kind == AbstractAction::Kind::HarvestMineral) wanted = std::max(wanted, e.worker_count);
    if (e.kind == AbstractAction::Kind::DeployUnit && e.unit_type == UnitType::Worker) wanted++;
  }
  int missing = std::clamp(wanted - own_workers, 0, 2);
  for (int i = 0; i < missing; ++i) {
    auto pos = plan.entries.begin();
    for (auto cur = plan.entries.begin(); cur != plan.entries.end(); ++cur)
      if (cur->kind == AbstractAction::Kind::HarvestMineral) pos = cur + 1;
    plan.entries.insert(pos, AbstractAction::produce(UnitType::Worker, spawn_dir));
  }

  if (static_cast<int>(plan.entries.size()) > cfg.plan_entry_cap)
    plan.entries.resize(static_cast<std::size_t>(cfg.plan_entry_cap));
  return plan;
}

inline PlannerPort rule_planner_port(PlannerConfig cfg = {}) {
  return [cfg](const GameState& obs, Player me, const Strategy& s,
               const std::vector<ExpertTip>& tips) { return rule_plan(obs, me, s, tips, cfg); };
}

// --- prompt assembly (for text-generation adapters) ---------------------------

struct PromptBundle {
  std::string system;        // static environment rules
  std::string strategy_text;
  std::string tips_text;
  std::string observation;
  std::string format_rules;

  std::string full() const {
    std::string out = system;
    if (!strategy_text.empty()) out += "\n\n" + strategy_text;
    if (!tips_text.empty()) out += "\n\n" + tips_text;
    out += "\n\n" + observation;
    out += "\n\n" + format_rules;
    return out;
  }
};

inline std::string default_env_info(const StatsTable& stats) {
  std::ostringstream os;
  os << "Two players fight on a small grid. Units act one atomic action at a time;\n"
        "each action takes several ticks. Workers harvest minerals and can build a\n"
        "Barracks; the Base produces Workers; the Barracks produces Light, Heavy and\n"
        "Ranged units. A player loses when none of their units remain.\n"
        "Unit table (hp/cost/damage/range):";
  for (UnitType t : {UnitType::Base, UnitType::Barracks, UnitType::Worker, UnitType::Light,
                     UnitType::Heavy, UnitType::Ranged}) {
    const UnitStats& st = stats.of(t);
    os << "\n  " << to_string(t) << " " << st.hp_max << "/" << st.cost << "/" << st.attack_damage
       << "/" << st.attack_range;
  }
  return os.str();
}

inline std::string render_observation(const GameState& obs, Player me, std::size_t max_rows) {
  std::ostringstream os;
  os << "tick " << obs.tick << ", you are " << to_string(me) << ", minerals " << obs.stock(me)
     << " vs " << obs.stock(enemy_of(me)) << "\nunits:";
  std::size_t rows = 0, skipped = 0;
  for (const Unit& u : obs.units) {
    if (rows >= max_rows) {
      skipped++;
      continue;
    }
    os << "\n  " << to_string(u.owner) << " " << to_string(u.type) << " id=" << u.id << " at ("
       << u.pos.x << "," << u.pos.y << ") hp=" << u.hp;
    if (u.type == UnitType::Worker) os << " carrying=" << u.carrying;
    if (u.type == UnitType::Mineral) os << " minerals=" << u.resource;
    if (!u.idle()) os << " busy=" << to_string(u.busy->action.kind);
    rows++;
  }
  if (skipped > 0) os << "\n  ... and " << skipped << " more";
  return os.str();
}

inline constexpr const char* k_plan_format_rules =
    "Reply with one plan entry per line, nothing else. Grammar:\n"
    "  DeployUnit type=<UnitType> x=<int> y=<int>\n"
    "  HarvestMineral workers=<int>\n"
    "  BuildBuilding type=Barracks x=<int> y=<int>\n"
    "  ProduceUnit type=<UnitType> dir=<N|E|S|W>\n"
    "  AttackEnemy type=<UnitType> target=<UnitType|Any>";

// Bounded prompt assembly. Observation rows compact first; if the bundle
// still exceeds the budget, throws std::length_error.
inline PromptBundle assemble_prompt(const GameState& obs, Player me, const Strategy& s,
                                    const std::vector<ExpertTip>& tips,
                                    const std::string& env_info, std::size_t budget = 8000) {
  PromptBundle b;
  b.system = env_info;
  {
    std::ostringstream os;
    os << "Play this strategy: " << strategy_to_string(s) << "\nencoded [";
    StrategyVector v = encode(s);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i != 0 ? "," : "") << v[i];
    os << "]";
    b.strategy_text = os.str();
  }
  if (!tips.empty()) {
    std::string t = "Expert tips:";
    for (const ExpertTip& tip : tips)
      if (tip.matches(s)) t += "\n- " + tip.directive;
    if (t != "Expert tips:") b.tips_text = t;
  }
  b.format_rules = k_plan_format_rules;

  std::size_t fixed = b.system.size() + b.strategy_text.size() + b.tips_text.size() +
                      b.format_rules.size() + 16;
  for (std::size_t rows : {std::size_t{128}, std::size_t{32}, std::size_t{8}, std::size_t{0}}) {
    b.observation = render_observation(obs, me, rows);
    if (fixed + b.observation.size() <= budget) return b;
  }
  throw std::length_error("assemble_prompt: budget too small even after compaction");
}

// Text-to-plan with validation; callers fall back to rule_plan when nothing
// parses.
inline PlanParseResult parse_plan(const std::string& text, const GameState& obs, Player me) {
  PlanParseResult r = parse_plan_text(text);
  if (r.plan) {
    for (const PlanIssue& issue : validate_plan(*r.plan, obs, me))
      r.warnings.push_back("entry " + std::to_string(issue.entry_index) + ": " + issue.message);
  }
  return r;
}

}  // namespace sap
