#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sap/core.hpp"

namespace sap {

enum class Player : std::uint8_t { P1, P2, Neutral };

inline Player enemy_of(Player p) {
  if (p == Player::P1) return Player::P2;
  if (p == Player::P2) return Player::P1;
  return Player::Neutral;
}

inline int seat_index(Player p) { return p == Player::P1 ? 0 : 1; }

// seat-mirrored direction preference, so deterministic scans give neither
// player a geometric edge
inline std::array<Dir, 4> seat_dirs(Player p) {
  if (p == Player::P2) return {Dir::S, Dir::W, Dir::N, Dir::E};
  return {Dir::N, Dir::E, Dir::S, Dir::W};
}

inline const char* to_string(Player p) {
  switch (p) {
    case Player::P1: return "P1";
    case Player::P2: return "P2";
    default: return "Neutral";
  }
}

enum class UnitType : std::uint8_t { Base, Barracks, Worker, Light, Heavy, Ranged, Mineral };

inline constexpr std::array<UnitType, 7> all_unit_types = {
    UnitType::Base,  UnitType::Barracks, UnitType::Worker, UnitType::Light,
    UnitType::Heavy, UnitType::Ranged,   UnitType::Mineral};

inline const char* to_string(UnitType t) {
  switch (t) {
    case UnitType::Base: return "Base";
    case UnitType::Barracks: return "Barracks";
    case UnitType::Worker: return "Worker";
    case UnitType::Light: return "Light";
    case UnitType::Heavy: return "Heavy";
    case UnitType::Ranged: return "Ranged";
    default: return "Mineral";
  }
}

inline bool unit_type_from_string(const std::string& s, UnitType& out) {
  for (UnitType t : all_unit_types) {
    if (s == to_string(t)) { out = t; return true; }
  }
  return false;
}

struct UnitStats {
  int hp_max = 1;
  int cost = 0;
  int attack_damage = 0;
  int attack_range = 0;  // Chebyshev cells
  int move_time = 0;
  int harvest_time = 0;
  int return_time = 0;
  int attack_time = 0;
  int produce_time = 0;  // ticks to produce a unit of this type

  bool operator==(const UnitStats&) const = default;
};

// Per-type stat table. Values follow the common MicroRTS-style balance and are
// override-able through the run config; see README for the full table.
struct StatsTable {
  std::array<UnitStats, 7> by_type{};

  StatsTable() {
    set(UnitType::Base,     {10, 10, 0, 0, 0, 0, 0, 0, 250});
    set(UnitType::Barracks, {4, 5, 0, 0, 0, 0, 0, 0, 100});
    set(UnitType::Worker,   {1, 1, 1, 1, 10, 20, 10, 5, 50});
    set(UnitType::Light,    {4, 2, 2, 1, 8, 0, 0, 5, 80});
    set(UnitType::Heavy,    {8, 3, 4, 1, 10, 0, 0, 5, 120});
    set(UnitType::Ranged,   {1, 2, 1, 3, 10, 0, 0, 5, 100});
    set(UnitType::Mineral,  {1, 0, 0, 0, 0, 0, 0, 0, 0});
  }

  const UnitStats& of(UnitType t) const { return by_type[static_cast<std::size_t>(t)]; }
  void set(UnitType t, UnitStats s) { by_type[static_cast<std::size_t>(t)] = s; }

  bool operator==(const StatsTable&) const = default;
};

inline bool is_building(UnitType t) { return t == UnitType::Base || t == UnitType::Barracks; }
inline bool is_mobile(UnitType t) {
  return t == UnitType::Worker || t == UnitType::Light || t == UnitType::Heavy ||
         t == UnitType::Ranged;
}
inline bool is_combat(UnitType t) { return is_mobile(t); }  // workers fight too

inline UnitType producer_of(UnitType t) {
  switch (t) {
    case UnitType::Worker: return UnitType::Base;
    case UnitType::Light:
    case UnitType::Heavy:
    case UnitType::Ranged: return UnitType::Barracks;
    case UnitType::Base:
    case UnitType::Barracks: return UnitType::Worker;
    default: throw std::invalid_argument("minerals are not producible");
  }
}

inline bool can_produce(UnitType producer, UnitType produced) {
  if (produced == UnitType::Mineral) return false;
  return producer_of(produced) == producer;
}

struct AtomicAction {
  enum class Kind : std::uint8_t { Noop, Move, Harvest, Return, Produce, Attack };

  Kind kind = Kind::Noop;
  Dir dir = Dir::N;                       // Move/Harvest/Return/Produce
  UnitType produce_type = UnitType::Worker;  // Produce
  Position target{};                      // Attack

  static AtomicAction noop() { return {}; }
  static AtomicAction move(Dir d) { return {Kind::Move, d, UnitType::Worker, {}}; }
  static AtomicAction harvest(Dir d) { return {Kind::Harvest, d, UnitType::Worker, {}}; }
  static AtomicAction ret(Dir d) { return {Kind::Return, d, UnitType::Worker, {}}; }
  static AtomicAction produce(Dir d, UnitType t) { return {Kind::Produce, d, t, {}}; }
  static AtomicAction attack(Position p) { return {Kind::Attack, Dir::N, UnitType::Worker, p}; }

  bool operator==(const AtomicAction&) const = default;
};

inline const char* to_string(AtomicAction::Kind k) {
  switch (k) {
    case AtomicAction::Kind::Noop: return "Noop";
    case AtomicAction::Kind::Move: return "Move";
    case AtomicAction::Kind::Harvest: return "Harvest";
    case AtomicAction::Kind::Return: return "Return";
    case AtomicAction::Kind::Produce: return "Produce";
    default: return "Attack";
  }
}

struct BusyAction {
  AtomicAction action;
  int remaining = 0;

  bool operator==(const BusyAction&) const = default;
};

struct Unit {
  int id = 0;
  Player owner = Player::Neutral;
  UnitType type = UnitType::Worker;
  Position pos{};
  int hp = 1;
  int carrying = 0;  // workers: 0 or 1
  int resource = 0;  // mineral patches: minerals remaining
  std::optional<BusyAction> busy;

  bool idle() const { return !busy.has_value(); }

  bool operator==(const Unit&) const = default;
};

enum class MapId { basesWorkers8x8, basesWorkers16x16 };

inline const char* to_string(MapId m) {
  return m == MapId::basesWorkers8x8 ? "basesWorkers8x8" : "basesWorkers16x16";
}

inline bool map_id_from_string(const std::string& s, MapId& out) {
  if (s == "basesWorkers8x8") { out = MapId::basesWorkers8x8; return true; }
  if (s == "basesWorkers16x16") { out = MapId::basesWorkers16x16; return true; }
  return false;
}

struct GameState {
  int tick = 0;
  int width = 0;
  int height = 0;
  std::vector<Unit> units;
  std::array<int, 2> resources{0, 0};  // mineral stock per player
  std::array<int, 2> spent{0, 0};      // cumulative minerals turned into spawned units
  std::array<int, 2> lost{0, 0};       // minerals carried by workers that died
  int step_limit = 0;
  std::uint64_t rng_state = 0;
  int next_unit_id = 0;
  StatsTable stats;

  bool in_bounds(Position p) const { return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height; }

  const Unit* unit_at(Position p) const {
    for (const Unit& u : units)
      if (u.pos == p) return &u;
    return nullptr;
  }

  Unit* unit_at(Position p) {
    for (Unit& u : units)
      if (u.pos == p) return &u;
    return nullptr;
  }

  const Unit* find_unit(int id) const {
    for (const Unit& u : units)
      if (u.id == id) return &u;
    return nullptr;
  }

  Unit* find_unit(int id) {
    for (Unit& u : units)
      if (u.id == id) return &u;
    return nullptr;
  }

  bool cell_free(Position p) const { return in_bounds(p) && unit_at(p) == nullptr; }

  int stock(Player p) const { return resources[seat_index(p)]; }

  bool operator==(const GameState&) const = default;
};

struct Outcome {
  enum class Kind : std::uint8_t { Ongoing, Win, Draw };
  Kind kind = Kind::Ongoing;
  Player winner = Player::Neutral;

  static Outcome ongoing() { return {Kind::Ongoing, Player::Neutral}; }
  static Outcome win(Player p) { return {Kind::Win, p}; }
  static Outcome draw() { return {Kind::Draw, Player::Neutral}; }

  bool over() const { return kind != Kind::Ongoing; }
  bool operator==(const Outcome&) const = default;
};

// Everything that happened during one step; fuels match metrics, the event
// log, and trajectory capture.
struct StepEvents {
  struct AttackEvent {
    int attacker = 0;
    Player attacker_owner = Player::Neutral;
    Position target{};
    int victim = -1;                      // -1: miss
    UnitType victim_type = UnitType::Worker;
    int damage = 0;                       // hp actually removed
  };
  struct SpawnEvent {
    int producer = 0;
    int unit = 0;
    Player owner = Player::Neutral;
    UnitType type = UnitType::Worker;
    Position pos{};
  };

  std::vector<AttackEvent> attacks;
  std::vector<SpawnEvent> spawns;
  std::vector<int> deaths;
  std::vector<int> harvest_completed;      // worker ids (successful pickups)
  std::vector<int> return_completed;       // worker ids (deposits)
  std::vector<int> cancelled_moves;        // unit ids whose move lost a cell conflict
  std::vector<int> refunded_produces;      // producer ids whose spawn cell was taken

  void clear() {
    attacks.clear();
    spawns.clear();
    deaths.clear();
    harvest_completed.clear();
    return_completed.clear();
    cancelled_moves.clear();
    refunded_produces.clear();
  }
};

using Assignments = std::map<int, AtomicAction>;

namespace detail {

inline Unit make_unit(GameState& s, Player owner, UnitType type, Position pos) {
  Unit u;
  u.id = s.next_unit_id++;
  u.owner = owner;
  u.type = type;
  u.pos = pos;
  u.hp = s.stats.of(type).hp_max;
  return u;
}

}  // namespace detail

// Text map format, one row per line:
//   '.' empty   'M' mineral   'b'/'B' base P1/P2   'w'/'W' worker P1/P2
inline GameState parse_text_map(const std::string& text, std::uint64_t seed, int step_limit,
                                int patch_minerals, int start_stock,
                                const StatsTable& stats = StatsTable{}) {
  std::vector<std::string> rows;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty()) rows.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) rows.push_back(cur);
  if (rows.empty()) throw std::invalid_argument("empty map text");

  GameState s;
  s.stats = stats;
  s.height = static_cast<int>(rows.size());
  s.width = static_cast<int>(rows[0].size());
  s.step_limit = step_limit;
  s.rng_state = seed;
  s.resources = {start_stock, start_stock};

  for (int y = 0; y < s.height; ++y) {
    if (static_cast<int>(rows[y].size()) != s.width)
      throw std::invalid_argument("ragged map text");
    for (int x = 0; x < s.width; ++x) {
      Position p{x, y};
      switch (rows[y][x]) {
        case '.': break;
        case 'M': {
          Unit u = detail::make_unit(s, Player::Neutral, UnitType::Mineral, p);
          u.resource = patch_minerals;
          s.units.push_back(u);
          break;
        }
        case 'b': s.units.push_back(detail::make_unit(s, Player::P1, UnitType::Base, p)); break;
        case 'B': s.units.push_back(detail::make_unit(s, Player::P2, UnitType::Base, p)); break;
        case 'w': s.units.push_back(detail::make_unit(s, Player::P1, UnitType::Worker, p)); break;
        case 'W': s.units.push_back(detail::make_unit(s, Player::P2, UnitType::Worker, p)); break;
        default: throw std::invalid_argument(std::string("unknown map char: ") + rows[y][x]);
      }
    }
  }
  return s;
}

inline constexpr const char* k_map_8x8 =
    "M.......\n"
    "Mwb.....\n"
    "........\n"
    "........\n"
    "........\n"
    "........\n"
    ".....BWM\n"
    ".......M\n";

inline constexpr const char* k_map_16x16 =
    "M...............\n"
    "Mwb.............\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    ".............BWM\n"
    "...............M\n";

inline int default_step_limit(MapId m) { return m == MapId::basesWorkers8x8 ? 2000 : 4000; }
inline int default_patch_minerals(MapId m) { return m == MapId::basesWorkers8x8 ? 25 : 40; }
inline constexpr int k_start_stock = 10;

inline GameState load_map(MapId map_id, std::uint64_t seed,
                          const StatsTable& stats = StatsTable{}) {
  const char* text = map_id == MapId::basesWorkers8x8 ? k_map_8x8 : k_map_16x16;
  return parse_text_map(text, seed, default_step_limit(map_id), default_patch_minerals(map_id),
                        k_start_stock, stats);
}

inline GameState load_map(const std::string& map_name, std::uint64_t seed,
                          const StatsTable& stats = StatsTable{}) {
  MapId id;
  if (!map_id_from_string(map_name, id))
    throw std::invalid_argument("unknown map_id: " + map_name);
  return load_map(id, seed, stats);
}

inline int action_duration(const GameState& s, const Unit& u, const AtomicAction& a) {
  const UnitStats& st = s.stats.of(u.type);
  switch (a.kind) {
    case AtomicAction::Kind::Noop: return 1;
    case AtomicAction::Kind::Move: return st.move_time;
    case AtomicAction::Kind::Harvest: return st.harvest_time;
    case AtomicAction::Kind::Return: return st.return_time;
    case AtomicAction::Kind::Attack: return st.attack_time;
    case AtomicAction::Kind::Produce: return s.stats.of(a.produce_type).produce_time;
  }
  return 1;
}

// Legality of a single action for a unit, checked against `stock_available`
// (callers batching several Produce issues in one tick pass a running ledger).
inline bool action_legal(const GameState& s, const Unit& u, const AtomicAction& a,
                         int stock_available) {
  if (!u.idle() || u.owner == Player::Neutral) return false;
  const UnitStats& st = s.stats.of(u.type);
  switch (a.kind) {
    case AtomicAction::Kind::Noop:
      return true;
    case AtomicAction::Kind::Move: {
      if (st.move_time <= 0) return false;
      return s.cell_free(neighbor(u.pos, a.dir));
    }
    case AtomicAction::Kind::Harvest: {
      if (u.type != UnitType::Worker || u.carrying != 0) return false;
      const Unit* t = s.unit_at(neighbor(u.pos, a.dir));
      return t != nullptr && t->type == UnitType::Mineral && t->resource > 0;
    }
    case AtomicAction::Kind::Return: {
      if (u.type != UnitType::Worker || u.carrying != 1) return false;
      const Unit* t = s.unit_at(neighbor(u.pos, a.dir));
      return t != nullptr && t->type == UnitType::Base && t->owner == u.owner;
    }
    case AtomicAction::Kind::Produce: {
      if (!can_produce(u.type, a.produce_type)) return false;
      if (!s.cell_free(neighbor(u.pos, a.dir))) return false;
      return stock_available >= s.stats.of(a.produce_type).cost;
    }
    case AtomicAction::Kind::Attack: {
      if (st.attack_damage <= 0 || st.attack_time <= 0) return false;
      if (chebyshev(u.pos, a.target) > st.attack_range) return false;
      const Unit* t = s.unit_at(a.target);
      return t != nullptr && t->owner == enemy_of(u.owner);
    }
  }
  return false;
}

inline bool action_legal(const GameState& s, const Unit& u, const AtomicAction& a) {
  return action_legal(s, u, a, s.stock(u.owner));
}

// All actions the unit could start this tick. Order is fixed: Noop, then
// Move/Harvest/Return/Produce in N,E,S,W order, then Attacks by target id.
inline std::vector<AtomicAction> legal_actions(const GameState& s, int unit_id) {
  const Unit* u = s.find_unit(unit_id);
  if (u == nullptr) throw std::invalid_argument("legal_actions: unknown unit");
  if (!u->idle()) throw std::invalid_argument("legal_actions: unit is busy");

  std::vector<AtomicAction> out;
  out.push_back(AtomicAction::noop());
  for (Dir d : all_dirs) {
    AtomicAction a = AtomicAction::move(d);
    if (action_legal(s, *u, a)) out.push_back(a);
  }
  for (Dir d : all_dirs) {
    AtomicAction a = AtomicAction::harvest(d);
    if (action_legal(s, *u, a)) out.push_back(a);
  }
  for (Dir d : all_dirs) {
    AtomicAction a = AtomicAction::ret(d);
    if (action_legal(s, *u, a)) out.push_back(a);
  }
  for (UnitType t : all_unit_types) {
    if (!can_produce(u->type, t) || t == UnitType::Mineral) continue;
    for (Dir d : all_dirs) {
      AtomicAction a = AtomicAction::produce(d, t);
      if (action_legal(s, *u, a)) out.push_back(a);
    }
  }
  if (s.stats.of(u->type).attack_damage > 0) {
    std::vector<const Unit*> targets;
    for (const Unit& v : s.units)
      if (v.owner == enemy_of(u->owner) &&
          chebyshev(u->pos, v.pos) <= s.stats.of(u->type).attack_range)
        targets.push_back(&v);
    std::sort(targets.begin(), targets.end(),
              [](const Unit* a, const Unit* b) { return a->id < b->id; });
    for (const Unit* t : targets) out.push_back(AtomicAction::attack(t->pos));
  }
  return out;
}

inline Outcome outcome(const GameState& s) {
  int alive[2] = {0, 0};
  for (const Unit& u : s.units)
    if (u.owner != Player::Neutral) alive[seat_index(u.owner)]++;
  if (alive[0] == 0 && alive[1] == 0) return Outcome::draw();  // mutual elimination
  if (alive[1] == 0) return Outcome::win(Player::P1);
  if (alive[0] == 0) return Outcome::win(Player::P2);
  if (s.tick >= s.step_limit) return Outcome::draw();
  return Outcome::ongoing();
}

// Advances the state by one tick in place. Throws std::invalid_argument on
// any illegal assignment before mutating anything. Assignment legality for
// stacked Produce orders is checked in unit-id order against a running stock
// ledger.
inline void step_inplace(GameState& s, const Assignments& assignments,
                         StepEvents* events = nullptr) {
  // validate first: state must be untouched on error
  {
    std::array<int, 2> ledger = s.resources;
    for (const auto& [id, a] : assignments) {
      const Unit* u = s.find_unit(id);
      if (u == nullptr) throw std::invalid_argument("step: assignment for unknown unit");
      if (!u->idle()) throw std::invalid_argument("step: assignment for busy unit");
      if (u->owner == Player::Neutral)
        throw std::invalid_argument("step: assignment for neutral unit");
      int& stock = ledger[seat_index(u->owner)];
      if (!action_legal(s, *u, a, stock)) throw std::invalid_argument("step: illegal action");
      if (a.kind == AtomicAction::Kind::Produce) stock -= s.stats.of(a.produce_type).cost;
    }
  }

  StepEvents scratch;
  StepEvents& ev = events != nullptr ? *events : scratch;
  ev.clear();

  Rng rng(0);
  rng.set_state(s.rng_state);
  bool rng_used = false;

  // issue: new actions become busy, produce escrows its minerals
  for (const auto& [id, a] : assignments) {
    Unit* u = s.find_unit(id);
    u->busy = BusyAction{a, action_duration(s, *u, a)};
    if (a.kind == AtomicAction::Kind::Produce)
      s.resources[seat_index(u->owner)] -= s.stats.of(a.produce_type).cost;
  }

  // tick down and collect completions
  std::vector<int> completed;
  for (Unit& u : s.units) {
    if (!u.busy) continue;
    u.busy->remaining -= 1;
    if (u.busy->remaining <= 0) completed.push_back(u.id);
  }

  // 1) attacks hit whatever occupies the target cell right now; damage is
  //    applied simultaneously, capped at remaining hp in attacker-id order
  for (int id : completed) {
    Unit* u = s.find_unit(id);
    if (u->busy->action.kind != AtomicAction::Kind::Attack) continue;
    StepEvents::AttackEvent e;
    e.attacker = id;
    e.attacker_owner = u->owner;
    e.target = u->busy->action.target;
    Unit* victim = s.unit_at(e.target);
    if (victim != nullptr && victim->owner != Player::Neutral && victim->hp > 0) {
      int dmg = std::min(s.stats.of(u->type).attack_damage, victim->hp);
      victim->hp -= dmg;
      e.victim = victim->id;
      e.victim_type = victim->type;
      e.damage = dmg;
    }
    ev.attacks.push_back(e);
  }

  // 2) deaths: a dying unit's in-flight work is lost; escrowed produce
  //    minerals are refunded so the books stay balanced
  {
    std::vector<Unit> survivors;
    survivors.reserve(s.units.size());
    for (Unit& u : s.units) {
      if (u.owner != Player::Neutral && u.hp <= 0) {
        ev.deaths.push_back(u.id);
        if (u.busy && u.busy->action.kind == AtomicAction::Kind::Produce)
          s.resources[seat_index(u.owner)] += s.stats.of(u.busy->action.produce_type).cost;
        s.lost[seat_index(u.owner)] += u.carrying;
        continue;
      }
      survivors.push_back(std::move(u));
    }
    s.units = std::move(survivors);
  }

  // 3) moves and spawns claim destination cells; contested cells go to one
  //    claimant drawn via the state generator, the rest are cancelled/refunded
  struct Claim {
    int unit_id;
    Position dest;
    bool is_spawn;
  };
  std::vector<Claim> claims;
  for (int id : completed) {
    Unit* u = s.find_unit(id);
    if (u == nullptr) continue;  // died this tick
    const AtomicAction& a = u->busy->action;
    if (a.kind == AtomicAction::Kind::Move)
      claims.push_back({id, neighbor(u->pos, a.dir), false});
    else if (a.kind == AtomicAction::Kind::Produce)
      claims.push_back({id, neighbor(u->pos, a.dir), true});
  }

  // group contenders per destination cell (claims are in unit-id order
  // because `completed` is built by scanning units in storage order and
  // storage order is id order)
  std::vector<char> claim_alive(claims.size(), 1);
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (!claim_alive[i]) continue;
    std::vector<std::size_t> group{i};
    for (std::size_t j = i + 1; j < claims.size(); ++j)
      if (claim_alive[j] && claims[j].dest == claims[i].dest) group.push_back(j);
    if (group.size() > 1) {
      rng_used = true;
      std::size_t winner = group[static_cast<std::size_t>(rng.below(group.size()))];
      for (std::size_t g : group)
        if (g != winner) claim_alive[g] = 0;
    }
  }

  // execute surviving claims; a claim is blocked if its destination is still
  // occupied. Movers can free cells for each other, so iterate to fixpoint.
  std::vector<char> claim_done(claims.size(), 0);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < claims.size(); ++i) {
      if (!claim_alive[i] || claim_done[i]) continue;
      if (s.unit_at(claims[i].dest) != nullptr) continue;
      Unit* u = s.find_unit(claims[i].unit_id);
      if (claims[i].is_spawn) {
        UnitType t = u->busy->action.produce_type;
        Unit spawned = detail::make_unit(s, u->owner, t, claims[i].dest);
        s.spent[seat_index(u->owner)] += s.stats.of(t).cost;
        ev.spawns.push_back({u->id, spawned.id, spawned.owner, t, claims[i].dest});
        s.units.push_back(spawned);
      } else {
        u->pos = claims[i].dest;
      }
      claim_done[i] = true;
      progress = true;
    }
  }
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (claim_done[i]) continue;
    Unit* u = s.find_unit(claims[i].unit_id);
    if (claims[i].is_spawn) {
      s.resources[seat_index(u->owner)] += s.stats.of(u->busy->action.produce_type).cost;
      ev.refunded_produces.push_back(u->id);
    } else if (!claim_alive[i]) {
      ev.cancelled_moves.push_back(u->id);
    } else {
      ev.cancelled_moves.push_back(u->id);  // blocked destination
    }
  }

  // 4) harvest / return effects
  for (int id : completed) {
    Unit* u = s.find_unit(id);
    if (u == nullptr) continue;
    const AtomicAction& a = u->busy->action;
    if (a.kind == AtomicAction::Kind::Harvest) {
      Unit* patch = s.unit_at(neighbor(u->pos, a.dir));
      if (patch != nullptr && patch->type == UnitType::Mineral && patch->resource > 0 &&
          u->carrying == 0) {
        patch->resource -= 1;
        u->carrying = 1;
        ev.harvest_completed.push_back(id);
      }
    } else if (a.kind == AtomicAction::Kind::Return) {
      Unit* base = s.unit_at(neighbor(u->pos, a.dir));
      if (base != nullptr && base->type == UnitType::Base && base->owner == u->owner &&
          u->carrying == 1) {
        u->carrying = 0;
        s.resources[seat_index(u->owner)] += 1;
        ev.return_completed.push_back(id);
      }
    }
  }

  // depleted patches disappear
  std::erase_if(s.units, [](const Unit& u) {
    return u.type == UnitType::Mineral && u.resource <= 0;
  });

  // clear finished busy slots
  for (Unit& u : s.units)
    if (u.busy && u.busy->remaining <= 0) u.busy.reset();

  if (rng_used) s.rng_state = rng.state();
  s.tick += 1;
}

inline GameState step(const GameState& s, const Assignments& assignments,
                      StepEvents* events = nullptr) {
  GameState next = s;
  step_inplace(next, assignments, events);
  return next;
}

// 180-degree rotation with seats swapped: positions mirror, directions flip,
// attack targets mirror, stock/spend ledgers swap. rng_state is untouched.
inline GameState rotate180(const GameState& s) {
  GameState r = s;
  std::swap(r.resources[0], r.resources[1]);
  std::swap(r.spent[0], r.spent[1]);
  std::swap(r.lost[0], r.lost[1]);
  auto flip_pos = [&](Position p) { return Position{s.width - 1 - p.x, s.height - 1 - p.y}; };
  for (Unit& u : r.units) {
    u.pos = flip_pos(u.pos);
    if (u.owner != Player::Neutral) u.owner = enemy_of(u.owner);
    if (u.busy) {
      AtomicAction& a = u.busy->action;
      switch (a.kind) {
        case AtomicAction::Kind::Move:
        case AtomicAction::Kind::Harvest:
        case AtomicAction::Kind::Return:
        case AtomicAction::Kind::Produce:
          a.dir = opposite(a.dir);
          break;
        case AtomicAction::Kind::Attack:
          a.target = flip_pos(a.target);
          break;
        default: break;
      }
    }
  }
  return r;
}

// Conservation ledger: stocks + carried + patch remainder + cumulative spend
// + escrow inside in-flight Produce actions. Constant across any step.
inline int mineral_total(const GameState& s) {
  int total = s.resources[0] + s.resources[1] + s.spent[0] + s.spent[1] + s.lost[0] + s.lost[1];
  for (const Unit& u : s.units) {
    total += u.carrying + u.resource;
    if (u.busy && u.busy->action.kind == AtomicAction::Kind::Produce)
      total += s.stats.of(u.busy->action.produce_type).cost;
  }
  return total;
}

}  // namespace sap
