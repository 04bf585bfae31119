#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sap/engine.hpp"

namespace sap {

// Parameterized macro actions. One plan entry drives many atomic actions.
struct AbstractAction {
  enum class Kind : std::uint8_t { DeployUnit, HarvestMineral, BuildBuilding, ProduceUnit, AttackEnemy };

  Kind kind = Kind::HarvestMineral;
  UnitType unit_type = UnitType::Worker;      // DeployUnit / ProduceUnit / AttackEnemy attacker
  Position target{};                          // DeployUnit target / BuildBuilding site
  int worker_count = 1;                       // HarvestMineral
  UnitType building_type = UnitType::Barracks;  // BuildBuilding
  Dir direction = Dir::N;                     // ProduceUnit
  bool target_any = true;                     // AttackEnemy: true = any enemy type
  UnitType target_type = UnitType::Worker;    // AttackEnemy when !target_any

  static AbstractAction deploy(UnitType t, Position p) {
    AbstractAction a;
    a.kind = Kind::DeployUnit;
    a.unit_type = t;
    a.target = p;
    return a;
  }
  static AbstractAction harvest(int workers) {
    AbstractAction a;
    a.kind = Kind::HarvestMineral;
    a.worker_count = workers;
    return a;
  }
  static AbstractAction build(UnitType building, Position site) {
    AbstractAction a;
    a.kind = Kind::BuildBuilding;
    a.building_type = building;
    a.target = site;
    return a;
  }
  static AbstractAction produce(UnitType t, Dir d) {
    AbstractAction a;
    a.kind = Kind::ProduceUnit;
    a.unit_type = t;
    a.direction = d;
    return a;
  }
  static AbstractAction attack(UnitType attacker, std::optional<UnitType> victim) {
    AbstractAction a;
    a.kind = Kind::AttackEnemy;
    a.unit_type = attacker;
    a.target_any = !victim.has_value();
    if (victim) a.target_type = *victim;
    return a;
  }

  bool operator==(const AbstractAction&) const = default;
};

inline const char* to_string(AbstractAction::Kind k) {
  switch (k) {
    case AbstractAction::Kind::DeployUnit: return "DeployUnit";
    case AbstractAction::Kind::HarvestMineral: return "HarvestMineral";
    case AbstractAction::Kind::BuildBuilding: return "BuildBuilding";
    case AbstractAction::Kind::ProduceUnit: return "ProduceUnit";
    default: return "AttackEnemy";
  }
}

struct Plan {
  std::vector<AbstractAction> entries;  // order is execution priority
  int created_tick = 0;

  bool operator==(const Plan&) const = default;
};

// --- plan record format -----------------------------------------------------
//
// One entry per line: ACTION_NAME key=value ...
//
//   DeployUnit type=Light x=3 y=4
//   HarvestMineral workers=2
//   BuildBuilding type=Barracks x=1 y=3
//   ProduceUnit type=Worker dir=N
//   AttackEnemy type=Light target=Worker     (target=Any for no preference)
//
// Lines starting with '#' and blank lines are skipped.

inline std::string serialize_entry(const AbstractAction& a) {
  std::ostringstream os;
  os << to_string(a.kind);
  switch (a.kind) {
    case AbstractAction::Kind::DeployUnit:
      os << " type=" << to_string(a.unit_type) << " x=" << a.target.x << " y=" << a.target.y;
      break;
    case AbstractAction::Kind::HarvestMineral:
      os << " workers=" << a.worker_count;
      break;
    case AbstractAction::Kind::BuildBuilding:
      os << " type=" << to_string(a.building_type) << " x=" << a.target.x << " y=" << a.target.y;
      break;
    case AbstractAction::Kind::ProduceUnit:
      os << " type=" << to_string(a.unit_type) << " dir=" << to_string(a.direction);
      break;
    case AbstractAction::Kind::AttackEnemy:
      os << " type=" << to_string(a.unit_type)
         << " target=" << (a.target_any ? "Any" : to_string(a.target_type));
      break;
  }
  return os.str();
}

inline std::string serialize_plan(const Plan& plan) {
  std::string out;
  for (const AbstractAction& a : plan.entries) {
    out += serialize_entry(a);
    out += '\n';
  }
  return out;
}

namespace detail {

inline bool parse_kv(const std::string& tok, std::string& key, std::string& val) {
  auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.size()) return false;
  key = tok.substr(0, eq);
  val = tok.substr(eq + 1);
  return true;
}

inline bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = s[0] == '-';
  if (neg) i = 1;
  if (i >= s.size()) return false;
  long v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
    if (v > 1000000) return false;
  }
  out = static_cast<int>(neg ? -v : v);
  return true;
}

}  // namespace detail

inline std::optional<AbstractAction> parse_entry(const std::string& line, std::string* error = nullptr) {
  auto fail = [&](const std::string& msg) -> std::optional<AbstractAction> {
    if (error != nullptr) *error = msg + ": " + line;
    return std::nullopt;
  };

  std::istringstream is(line);
  std::string name;
  if (!(is >> name)) return fail("empty entry");

  std::string key, val;
  std::string tok;
  AbstractAction a;
  bool has_type = false, has_x = false, has_y = false, has_workers = false, has_dir = false,
       has_target = false;
  UnitType type_val = UnitType::Worker;
  int x = 0, y = 0, workers = 0;
  Dir dir = Dir::N;
  bool tgt_any = false;
  UnitType tgt_type = UnitType::Worker;

  while (is >> tok) {
    if (!detail::parse_kv(tok, key, val)) return fail("malformed token");
    if (key == "type") {
      if (!unit_type_from_string(val, type_val)) return fail("unknown type");
      has_type = true;
    } else if (key == "x") {
      if (!detail::parse_int(val, x)) return fail("bad x");
      has_x = true;
    } else if (key == "y") {
      if (!detail::parse_int(val, y)) return fail("bad y");
      has_y = true;
    } else if (key == "workers") {
      if (!detail::parse_int(val, workers)) return fail("bad workers");
      has_workers = true;
    } else if (key == "dir") {
      if (!dir_from_string(val, dir)) return fail("bad dir");
      has_dir = true;
    } else if (key == "target") {
      if (val == "Any") {
        tgt_any = true;
      } else if (!unit_type_from_string(val, tgt_type)) {
        return fail("bad target");
      }
      has_target = true;
    } else {
      return fail("unknown key " + key);
    }
  }

  if (name == "DeployUnit") {
    if (!has_type || !has_x || !has_y) return fail("DeployUnit needs type,x,y");
    return AbstractAction::deploy(type_val, {x, y});
  }
  if (name == "HarvestMineral") {
    if (!has_workers || workers < 0) return fail("HarvestMineral needs workers>=0");
    return AbstractAction::harvest(workers);
  }
  if (name == "BuildBuilding") {
    if (!has_type || !has_x || !has_y) return fail("BuildBuilding needs type,x,y");
    a = AbstractAction::build(type_val, {x, y});
    return a;
  }
  if (name == "ProduceUnit") {
    if (!has_type || !has_dir) return fail("ProduceUnit needs type,dir");
    return AbstractAction::produce(type_val, dir);
  }
  if (name == "AttackEnemy") {
    if (!has_type || !has_target) return fail("AttackEnemy needs type,target");
    return AbstractAction::attack(type_val, tgt_any ? std::nullopt : std::optional<UnitType>(tgt_type));
  }
  return fail("unknown action " + name);
}

struct PlanParseResult {
  std::optional<Plan> plan;                // nullopt: nothing parseable
  std::vector<std::string> warnings;
};

inline PlanParseResult parse_plan_text(const std::string& text) {
  PlanParseResult r;
  Plan p;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::string err;
    auto entry = parse_entry(line.substr(first), &err);
    if (entry) {
      p.entries.push_back(*entry);
    } else {
      r.warnings.push_back(err);
    }
  }
  if (!p.entries.empty()) r.plan = std::move(p);
  return r;
}

// --- static plan validation --------------------------------------------------

struct PlanIssue {
  int entry_index = 0;
  std::string message;
};

// Non-fatal checks against the current state: the executor degrades
// gracefully, this exists to surface suspect entries up front.
inline std::vector<PlanIssue> validate_plan(const Plan& plan, const GameState& s, Player owner) {
  std::vector<PlanIssue> issues;
  int stock = s.stock(owner);
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const AbstractAction& a = plan.entries[i];
    int idx = static_cast<int>(i);
    switch (a.kind) {
      case AbstractAction::Kind::DeployUnit:
        if (!s.in_bounds(a.target))
          issues.push_back({idx, "DeployUnit target out of bounds"});
        if (!is_mobile(a.unit_type))
          issues.push_back({idx, "DeployUnit needs a mobile unit type"});
        break;
      case AbstractAction::Kind::HarvestMineral:
        if (a.worker_count <= 0) issues.push_back({idx, "HarvestMineral with no workers"});
        break;
      case AbstractAction::Kind::BuildBuilding: {
        if (!s.in_bounds(a.target))
          issues.push_back({idx, "BuildBuilding site out of bounds"});
        if (!can_produce(UnitType::Worker, a.building_type))
          issues.push_back({idx, "building type not worker-buildable"});
        else if (stock < s.stats.of(a.building_type).cost)
          issues.push_back({idx, "BuildBuilding not affordable at validation time"});
        break;
      }
      case AbstractAction::Kind::ProduceUnit:
        if (is_building(a.unit_type) || a.unit_type == UnitType::Mineral)
          issues.push_back({idx, "ProduceUnit is for mobile units"});
        break;
      case AbstractAction::Kind::AttackEnemy:
        if (!is_combat(a.unit_type)) issues.push_back({idx, "attacker type cannot fight"});
        break;
    }
  }
  return issues;
}

}  // namespace sap
