#pragma once

#include <istream>
#include <ostream>

#include <json.hpp>

#include "sap/trajectory.hpp"

namespace sap {

using nlohmann::json;

// Match event log: one JSON record per tick with the pre-step unit snapshot,
// the issued actions of both seats, and the completions the step produced.
// The trajectory loader below rebuilds a Trajectory from this format.

inline json action_to_json(const AtomicAction& a) {
  json j{{"kind", to_string(a.kind)}};
  switch (a.kind) {
    case AtomicAction::Kind::Move:
    case AtomicAction::Kind::Harvest:
    case AtomicAction::Kind::Return:
      j["dir"] = to_string(a.dir);
      break;
    case AtomicAction::Kind::Produce:
      j["dir"] = to_string(a.dir);
      j["type"] = to_string(a.produce_type);
      break;
    case AtomicAction::Kind::Attack:
      j["x"] = a.target.x;
      j["y"] = a.target.y;
      break;
    default: break;
  }
  return j;
}

inline AtomicAction action_from_json(const json& j) {
  AtomicAction a;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "Noop") return AtomicAction::noop();
  Dir d = Dir::N;
  if (j.contains("dir")) dir_from_string(j.at("dir").get<std::string>(), d);
  if (kind == "Move") return AtomicAction::move(d);
  if (kind == "Harvest") return AtomicAction::harvest(d);
  if (kind == "Return") return AtomicAction::ret(d);
  if (kind == "Produce") {
    UnitType t = UnitType::Worker;
    unit_type_from_string(j.at("type").get<std::string>(), t);
    return AtomicAction::produce(d, t);
  }
  if (kind == "Attack") return AtomicAction::attack({j.at("x").get<int>(), j.at("y").get<int>()});
  throw std::invalid_argument("unknown action kind: " + kind);
}

inline json issued_to_json(const Assignments& as) {
  json arr = json::array();
  for (const auto& [uid, action] : as) {
    json j = action_to_json(action);
    j["unit"] = uid;
    arr.push_back(j);
  }
  return arr;
}

inline void write_event_log_tick(std::ostream& out, const GameState& pre_state,
                                 const Assignments& p1, const Assignments& p2,
                                 const StepEvents* events = nullptr) {
  json units = json::array();
  for (const Unit& u : pre_state.units) {
    json ju{{"id", u.id},     {"owner", to_string(u.owner)}, {"type", to_string(u.type)},
            {"x", u.pos.x},   {"y", u.pos.y},                {"hp", u.hp}};
    if (u.type == UnitType::Worker) ju["carrying"] = u.carrying;
    if (u.type == UnitType::Mineral) ju["minerals"] = u.resource;
    units.push_back(ju);
  }
  json j{{"tick", pre_state.tick},
         {"units", units},
         {"issued", {{"P1", issued_to_json(p1)}, {"P2", issued_to_json(p2)}}}};
  if (events != nullptr) {
    json done = json::array();
    for (const auto& a : events->attacks) {
      json e{{"event", "attack"}, {"unit", a.attacker}, {"x", a.target.x}, {"y", a.target.y},
             {"damage", a.damage}};
      if (a.victim >= 0) e["victim"] = a.victim;
      done.push_back(e);
    }
    for (const auto& sp : events->spawns)
      done.push_back(json{{"event", "spawn"}, {"unit", sp.unit}, {"producer", sp.producer},
                          {"type", to_string(sp.type)}, {"x", sp.pos.x}, {"y", sp.pos.y}});
    for (int id : events->deaths) done.push_back(json{{"event", "death"}, {"unit", id}});
    for (int id : events->harvest_completed)
      done.push_back(json{{"event", "harvest"}, {"unit", id}});
    for (int id : events->return_completed)
      done.push_back(json{{"event", "deposit"}, {"unit", id}});
    j["completed"] = done;
  }
  out << j.dump() << "\n";
}

// Behavior digests as structured records, for offline analysis.
inline json summary_to_json(const PlayerSummary& s) {
  json j{{"harvest_count", s.harvest_count},
         {"return_count", s.return_count},
         {"attack_count", s.attack_count},
         {"attacks_in_own_half", s.attacks_in_own_half},
         {"attacks_in_enemy_half", s.attacks_in_enemy_half},
         {"own_half_fraction", s.own_half_fraction},
         {"enemy_half_fraction", s.enemy_half_fraction},
         {"mean_army_distance_to_enemy_base", s.mean_army_distance_to_enemy_base},
         {"ticks_observed", s.ticks_observed}};
  json produce = json::object();
  for (UnitType t : all_unit_types)
    if (s.produced(t) > 0) produce[to_string(t)] = s.produced(t);
  j["produce_count"] = produce;
  if (s.barracks_completed_tick) j["barracks_completed_tick"] = *s.barracks_completed_tick;
  json pos = json::array();
  for (const Position& p : s.attack_issue_positions) pos.push_back({p.x, p.y});
  j["attack_issue_positions"] = pos;
  json victims = json::object();
  for (UnitType t : all_unit_types) {
    int n = s.victim_type_count[static_cast<std::size_t>(t)];
    if (n > 0) victims[to_string(t)] = n;
  }
  j["victim_type_count"] = victims;
  return j;
}

inline json summary_to_json(const TrajectorySummary& s) {
  return json{{"ticks", s.ticks},
              {"P1", summary_to_json(s.players[0])},
              {"P2", summary_to_json(s.players[1])}};
}

// Rebuild a trajectory (and its summary counters) from a stored event log.
// `reference` supplies grid geometry and the stat table.
inline Trajectory load_trajectory(std::istream& in, const GameState& reference) {
  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    GameState state;
    state.width = reference.width;
    state.height = reference.height;
    state.step_limit = reference.step_limit;
    state.stats = reference.stats;
    state.tick = j.at("tick").get<int>();
    for (const json& ju : j.at("units")) {
      Unit u;
      u.id = ju.at("id").get<int>();
      std::string owner = ju.at("owner").get<std::string>();
      u.owner = owner == "P1" ? Player::P1 : owner == "P2" ? Player::P2 : Player::Neutral;
      unit_type_from_string(ju.at("type").get<std::string>(), u.type);
      u.pos = {ju.at("x").get<int>(), ju.at("y").get<int>()};
      u.hp = ju.at("hp").get<int>();
      u.carrying = ju.value("carrying", 0);
      u.resource = ju.value("minerals", 0);
      state.units.push_back(u);
    }
    Assignments p1, p2;
    for (const json& ja : j.at("issued").at("P1")) p1[ja.at("unit").get<int>()] = action_from_json(ja);
    for (const json& ja : j.at("issued").at("P2")) p2[ja.at("unit").get<int>()] = action_from_json(ja);
    traj.record(state, p1, p2);
  }
  return traj;
}

}  // namespace sap
