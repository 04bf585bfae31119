#pragma once

#include <limits>
#include <map>
#include <vector>

#include "sap/pathfind.hpp"
#include "sap/plan.hpp"

namespace sap {

enum class EntryStatus : std::uint8_t { Pending, Active, Done, Failed };

inline const char* to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::Pending: return "pending";
    case EntryStatus::Active: return "active";
    case EntryStatus::Done: return "done";
    default: return "failed";
  }
}

struct EntryState {
  EntryStatus status = EntryStatus::Pending;
  std::vector<int> units;   // claimed unit ids
  bool issued = false;      // ProduceUnit/BuildBuilding: Produce has been started
  int issuer = -1;          // unit that started it
  bool launched = false;    // AttackEnemy: the wave is committed
  int wait_ticks = 0;       // AttackEnemy: rally time so far
};

// Per-match, per-player plan execution state. Discard and rebuild on replan;
// in-flight atomic actions simply run to completion and the units rejoin.
struct ExecutorState {
  Player me = Player::P1;
  Plan plan;
  std::vector<EntryState> entries;
  std::map<int, int> claims;  // unit id -> entry index

  bool terminal(int entry) const {
    return entries[static_cast<std::size_t>(entry)].status == EntryStatus::Done ||
           entries[static_cast<std::size_t>(entry)].status == EntryStatus::Failed;
  }
};

inline ExecutorState make_executor(Player me, Plan plan) {
  ExecutorState e;
  e.me = me;
  e.plan = std::move(plan);
  e.entries.assign(e.plan.entries.size(), EntryState{});
  return e;
}

// intruders inside our half closer than this pull idle units off their duties
inline constexpr int k_intercept_radius = 5;

// attack waves rally until this many units stand ready (or the rally times
// out); trickling units into a defended position one by one loses fights.
// The timeout must sit inside one replan window or waves would never launch.
inline constexpr int k_attack_wave_min = 3;
inline constexpr int k_attack_wave_patience = 120;

namespace detail {

constexpr int k_far = 1000000;

inline void release_entry_claims(ExecutorState& exec, int entry) {
  EntryState& es = exec.entries[static_cast<std::size_t>(entry)];
  for (int id : es.units) exec.claims.erase(id);
  es.units.clear();
}

inline void set_status(ExecutorState& exec, int entry, EntryStatus st) {
  EntryState& es = exec.entries[static_cast<std::size_t>(entry)];
  es.status = st;
  if (st == EntryStatus::Done || st == EntryStatus::Failed) release_entry_claims(exec, entry);
}

inline void claim(ExecutorState& exec, int entry, int unit_id) {
  exec.entries[static_cast<std::size_t>(entry)].units.push_back(unit_id);
  exec.claims[unit_id] = entry;
}

// distance key for claim selection: path length when reachable, pushed past
// any real path otherwise, manhattan as the far tiebreak
inline int approach_cost(const GameState& s, Position from, Position to) {
  auto len = path_length(s, from, to);
  if (len) return *len;
  return k_far + manhattan(from, to);
}

inline const Unit* nearest_unit(Position from, const std::vector<const Unit*>& candidates) {
  const Unit* best = nullptr;
  int best_d = std::numeric_limits<int>::max();
  for (const Unit* u : candidates) {
    int d = manhattan(from, u->pos);
    if (d < best_d || (d == best_d && best != nullptr && u->id < best->id)) {
      best = u;
      best_d = d;
    }
  }
  return best;
}

// pick the unclaimed own unit of `type` closest to `goal` (path length, then id)
inline int pick_nearest_unclaimed(const GameState& s, const ExecutorState& exec, UnitType type,
                                  Position goal) {
  int best_id = -1;
  int best_cost = std::numeric_limits<int>::max();
  for (const Unit& u : s.units) {
    if (u.owner != exec.me || u.type != type) continue;
    if (exec.claims.count(u.id) != 0) continue;
    int c = approach_cost(s, u.pos, goal);
    if (c < best_cost) {
      best_cost = c;
      best_id = u.id;
    }
  }
  return best_id;
}

inline bool adjacent_dir(Position from, Position to, Dir& out) {
  for (Dir d : all_dirs) {
    if (neighbor(from, d) == to) {
      out = d;
      return true;
    }
  }
  return false;
}

// first Move step toward `goal` (goal cell itself exempt from blocking); no
// assignment when adjacent or unreachable
inline bool step_toward(const GameState& s, const Unit& u, Position goal, AtomicAction& out) {
  auto path = pathfind(s, u.pos, goal);
  if (!path || path->size() < 2) return false;  // adjacent or unreachable
  out = AtomicAction::move((*path)[0]);
  return true;
}

// Variant for home duties (harvesting, building, garrisoning, intercepting):
// never step across the midline. Detours around friendly traffic must not
// route a quiet unit through enemy territory.
inline bool step_toward_home(const GameState& s, Player me, const Unit& u, Position goal,
                             AtomicAction& out) {
  AtomicAction mv;
  if (!step_toward(s, u, goal, mv)) return false;
  int mid = (s.width + s.height - 2) / 2;
  Position next = neighbor(u.pos, mv.dir);
  bool home = me == Player::P1 ? next.x + next.y <= mid : next.x + next.y >= mid;
  if (!home) return false;  // hold position until a home-side route opens
  out = mv;
  return true;
}

}  // namespace detail

// Expands the plan into this tick's atomic assignments for exec.me's units.
// Deterministic: entries in priority order, unit scans in id order, pathfind
// tie-breaks fixed. Own idle units with an enemy inside attack range strike
// back regardless of their entry. Every emitted action is legal this tick.
inline Assignments tick_controller(const GameState& s, ExecutorState& exec) {
  Assignments out;

  // sync claims with the world
  {
    std::vector<int> drop;
    for (const auto& [uid, entry] : exec.claims) {
      const Unit* u = s.find_unit(uid);
      if (u == nullptr || u->owner != exec.me) drop.push_back(uid);
    }
    for (int uid : drop) {
      int entry = exec.claims[uid];
      EntryState& es = exec.entries[static_cast<std::size_t>(entry)];
      std::erase(es.units, uid);
      exec.claims.erase(uid);
    }
  }

  int shadow_stock = s.stock(exec.me);
  auto acted = [&](int uid) { return out.count(uid) != 0; };

  // self-defense: idle units strike enemies in range, and mobile units
  // intercept intruders strictly inside our half (the midline diagonal is
  // no-man's land, so opposing guard posts don't provoke each other)
  {
    int mid = (s.width + s.height - 2) / 2;
    auto strictly_ours = [&](Position p) {
      return exec.me == Player::P1 ? p.x + p.y < mid : p.x + p.y > mid;
    };
    auto in_own_half = [&](Position p) {
      return exec.me == Player::P1 ? p.x + p.y <= mid : p.x + p.y >= mid;
    };
    std::vector<const Unit*> intruders;
    for (const Unit& v : s.units)
      if (v.owner == enemy_of(exec.me) && strictly_ours(v.pos)) intruders.push_back(&v);

    auto strictly_theirs = [&](Position p) {
      return exec.me == Player::P1 ? p.x + p.y > mid : p.x + p.y < mid;
    };
    for (const Unit& u : s.units) {
      if (u.owner != exec.me || !u.idle()) continue;
      const UnitStats& st = s.stats.of(u.type);
      if (st.attack_damage <= 0 || st.attack_time <= 0) continue;
      std::vector<const Unit*> in_range;
      for (const Unit& v : s.units) {
        if (v.owner != enemy_of(exec.me) || chebyshev(u.pos, v.pos) > st.attack_range) continue;
        // no long-range sniping across the border while both sides stand on
        // home ground; point-blank threats are always answered
        if (strictly_ours(u.pos) && strictly_theirs(v.pos) && chebyshev(u.pos, v.pos) > 1)
          continue;
        in_range.push_back(&v);
      }
      if (!in_range.empty()) {
        const Unit* target = detail::nearest_unit(u.pos, in_range);
        out[u.id] = AtomicAction::attack(target->pos);
        continue;
      }
      if (intruders.empty() || !is_mobile(u.type) || !in_own_half(u.pos)) continue;
      const Unit* threat = detail::nearest_unit(u.pos, intruders);
      if (manhattan(u.pos, threat->pos) <= k_intercept_radius) {
        AtomicAction mv;
        if (detail::step_toward_home(s, exec.me, u, threat->pos, mv) &&
            action_legal(s, u, mv, shadow_stock))
          out[u.id] = mv;
      }
    }
  }

  std::vector<const Unit*> enemies;
  for (const Unit& u : s.units)
    if (u.owner == enemy_of(exec.me)) enemies.push_back(&u);

  for (int ei = 0; ei < static_cast<int>(exec.plan.entries.size()); ++ei) {
    if (exec.terminal(ei)) continue;
    const AbstractAction& a = exec.plan.entries[static_cast<std::size_t>(ei)];
    EntryState& es = exec.entries[static_cast<std::size_t>(ei)];

    switch (a.kind) {
      case AbstractAction::Kind::HarvestMineral: {
        if (a.worker_count <= 0) {
          detail::set_status(exec, ei, EntryStatus::Done);
          break;
        }
        // mine our side of the map only; trekking into enemy territory for
        // minerals is an attack posture, not an economy one
        int mid = (s.width + s.height - 2) / 2;
        std::vector<const Unit*> patches;
        const Unit* base = nullptr;
        for (const Unit& u : s.units) {
          bool ours = exec.me == Player::P1 ? u.pos.x + u.pos.y <= mid : u.pos.x + u.pos.y >= mid;
          if (u.type == UnitType::Mineral && u.resource > 0 && ours) patches.push_back(&u);
          if (u.type == UnitType::Base && u.owner == exec.me && base == nullptr) base = &u;
        }
        if (patches.empty()) {
          detail::set_status(exec, ei, EntryStatus::Done);
          break;
        }
        if (base == nullptr) {
          detail::set_status(exec, ei, EntryStatus::Failed);
          break;
        }
        es.status = EntryStatus::Active;
        while (static_cast<int>(es.units.size()) < a.worker_count) {
          int uid = detail::pick_nearest_unclaimed(s, exec, UnitType::Worker, patches[0]->pos);
          if (uid < 0) break;
          detail::claim(exec, ei, uid);
        }
        for (int uid : es.units) {
          const Unit* w = s.find_unit(uid);
          if (w == nullptr || !w->idle() || acted(uid)) continue;
          if (w->carrying == 1) {
            Dir d;
            if (detail::adjacent_dir(w->pos, base->pos, d)) {
              out[uid] = AtomicAction::ret(d);
            } else {
              AtomicAction mv;
              if (detail::step_toward_home(s, exec.me, *w, base->pos, mv) &&
                  action_legal(s, *w, mv, shadow_stock))
                out[uid] = mv;
            }
          } else {
            const Unit* best_patch = nullptr;
            int best_c = std::numeric_limits<int>::max();
            Dir adj{};
            bool adjacent = false;
            for (const Unit* p : patches) {
              Dir d;
              if (detail::adjacent_dir(w->pos, p->pos, d)) {
                adjacent = true;
                adj = d;
                break;
              }
              int c = detail::approach_cost(s, w->pos, p->pos);
              if (c < best_c) {
                best_c = c;
                best_patch = p;
              }
            }
            if (adjacent) {
              out[uid] = AtomicAction::harvest(adj);
            } else if (best_patch != nullptr) {
              AtomicAction mv;
              if (detail::step_toward_home(s, exec.me, *w, best_patch->pos, mv) &&
                  action_legal(s, *w, mv, shadow_stock))
                out[uid] = mv;
            }
          }
        }
        break;
      }

      case AbstractAction::Kind::BuildBuilding: {
        if (!s.in_bounds(a.target) || !can_produce(UnitType::Worker, a.building_type)) {
          detail::set_status(exec, ei, EntryStatus::Failed);
          break;
        }
        const Unit* at_site = s.unit_at(a.target);
        if (at_site != nullptr && at_site->type == a.building_type && at_site->owner == exec.me) {
          detail::set_status(exec, ei, EntryStatus::Done);
          break;
        }
        bool have_worker = false, have_base = false;
        for (const Unit& u : s.units) {
          if (u.owner != exec.me) continue;
          if (u.type == UnitType::Worker) have_worker = true;
          if (u.type == UnitType::Base) have_base = true;
        }
        if (!have_worker && !have_base) {
          detail::set_status(exec, ei, EntryStatus::Failed);
          break;
        }
        int cost = s.stats.of(a.building_type).cost;
        if (es.units.empty()) {
          // don't pull a worker off other duties until the build is funded
          if (shadow_stock < cost || !have_worker) {
            es.status = EntryStatus::Pending;
            break;
          }
          int uid = detail::pick_nearest_unclaimed(s, exec, UnitType::Worker, a.target);
          if (uid < 0) {
            es.status = EntryStatus::Pending;
            break;
          }
          detail::claim(exec, ei, uid);
        }
        es.status = EntryStatus::Active;
        for (int uid : es.units) {
          const Unit* w = s.find_unit(uid);
          if (w == nullptr || !w->idle() || acted(uid)) continue;
          Dir d;
          if (detail::adjacent_dir(w->pos, a.target, d)) {
            AtomicAction pr = AtomicAction::produce(d, a.building_type);
            if (action_legal(s, *w, pr, shadow_stock)) {
              out[uid] = pr;
              shadow_stock -= cost;
              es.issued = true;
              es.issuer = uid;
            }
            // site blocked or unfunded: hold position
          } else {
            int mid = (s.width + s.height - 2) / 2;
            bool home_site = exec.me == Player::P1 ? a.target.x + a.target.y <= mid
                                                   : a.target.x + a.target.y >= mid;
            AtomicAction mv;
            bool ok = home_site ? detail::step_toward_home(s, exec.me, *w, a.target, mv)
                                : detail::step_toward(s, *w, a.target, mv);
            if (ok && action_legal(s, *w, mv, shadow_stock)) out[uid] = mv;
          }
        }
        break;
      }

      case AbstractAction::Kind::ProduceUnit: {
        if (a.unit_type == UnitType::Mineral || is_building(a.unit_type)) {
          detail::set_status(exec, ei, EntryStatus::Failed);
          break;
        }
        UnitType pt = producer_of(a.unit_type);
        const Unit* producer = nullptr;
        for (int uid : es.units)
          if (const Unit* u = s.find_unit(uid)) producer = u;
        if (producer == nullptr) {
          if (es.issued) {
            // producer died after starting: give up on this entry
            detail::set_status(exec, ei, EntryStatus::Failed);
            break;
          }
          for (const Unit& u : s.units) {
            if (u.owner == exec.me && u.type == pt && exec.claims.count(u.id) == 0) {
              producer = &u;
              break;
            }
          }
          if (producer == nullptr) {
            bool any_alive = false;
            for (const Unit& u : s.units)
              if (u.owner == exec.me && u.type == pt) any_alive = true;
            if (any_alive) {
              es.status = EntryStatus::Pending;  // all producers claimed ahead of us
              break;
            }
            bool build_coming = false;
            for (std::size_t j = 0; j < exec.plan.entries.size(); ++j) {
              const AbstractAction& b = exec.plan.entries[j];
              if (b.kind == AbstractAction::Kind::BuildBuilding && b.building_type == pt &&
                  exec.entries[j].status != EntryStatus::Failed)
                build_coming = true;
            }
            if (build_coming) {
              es.status = EntryStatus::Pending;
              break;
            }
            detail::set_status(exec, ei, EntryStatus::Failed);
            break;
          }
          detail::claim(exec, ei, producer->id);
        }
        es.status = EntryStatus::Active;
        if (producer->idle() && !acted(producer->id)) {
          if (es.issued) {
            detail::set_status(exec, ei, EntryStatus::Done);  // production finished
            break;
          }
          int cost = s.stats.of(a.unit_type).cost;
          if (shadow_stock >= cost) {
            Dir chosen{};
            bool found = false;
            if (s.cell_free(neighbor(producer->pos, a.direction))) {
              chosen = a.direction;
              found = true;
            } else {
              for (Dir d : seat_dirs(exec.me))
                if (s.cell_free(neighbor(producer->pos, d))) {
                  chosen = d;
                  found = true;
                  break;
                }
            }
            if (found) {
              out[producer->id] = AtomicAction::produce(chosen, a.unit_type);
              shadow_stock -= cost;
              es.issued = true;
              es.issuer = producer->id;
            }
          }
        }
        break;
      }

      case AbstractAction::Kind::DeployUnit: {
        if (!s.in_bounds(a.target) || !is_mobile(a.unit_type)) {
          detail::set_status(exec, ei, EntryStatus::Failed);
          break;
        }
        const Unit* at_target = s.unit_at(a.target);
        if (at_target != nullptr && at_target->owner == exec.me &&
            at_target->type == a.unit_type) {
          detail::set_status(exec, ei, EntryStatus::Done);
          break;
        }
        if (es.units.empty()) {
          int uid = detail::pick_nearest_unclaimed(s, exec, a.unit_type, a.target);
          if (uid < 0) {
            bool supply_coming = false;
            for (std::size_t j = 0; j < exec.plan.entries.size(); ++j) {
              const AbstractAction& b = exec.plan.entries[j];
              if (b.kind == AbstractAction::Kind::ProduceUnit && b.unit_type == a.unit_type &&
                  exec.entries[j].status != EntryStatus::Failed)
                supply_coming = true;
            }
            bool any_alive = false;
            for (const Unit& u : s.units)
              if (u.owner == exec.me && u.type == a.unit_type) any_alive = true;
            if (any_alive || supply_coming ||
                (a.unit_type == UnitType::Worker)) {  // bases keep making workers
              es.status = EntryStatus::Pending;
            } else {
              detail::set_status(exec, ei, EntryStatus::Failed);
            }
            break;
          }
          detail::claim(exec, ei, uid);
        }
        es.status = EntryStatus::Active;
        for (int uid : es.units) {
          const Unit* u = s.find_unit(uid);
          if (u == nullptr || !u->idle() || acted(uid)) continue;
          if (u->pos == a.target) {
            detail::set_status(exec, ei, EntryStatus::Done);
            break;
          }
          int mid = (s.width + s.height - 2) / 2;
          bool home_post = exec.me == Player::P1 ? a.target.x + a.target.y <= mid
                                                 : a.target.x + a.target.y >= mid;
          AtomicAction mv;
          bool ok = home_post ? detail::step_toward_home(s, exec.me, *u, a.target, mv)
                              : detail::step_toward(s, *u, a.target, mv);
          if (ok && action_legal(s, *u, mv, shadow_stock)) {
            out[uid] = mv;
          } else if (auto p = pathfind(s, u->pos, a.target); p && p->size() == 1) {
            AtomicAction last = AtomicAction::move((*p)[0]);
            if (action_legal(s, *u, last, shadow_stock)) out[uid] = last;
            // target occupied: hold adjacent until it clears
          }
        }
        break;
      }

      case AbstractAction::Kind::AttackEnemy: {
        std::vector<const Unit*> victims;
        for (const Unit* e : enemies)
          if (a.target_any || e->type == a.target_type) victims.push_back(e);
        if (victims.empty()) {
          detail::set_status(exec, ei, EntryStatus::Done);
          break;
        }
        if (!is_combat(a.unit_type)) {
          detail::set_status(exec, ei, EntryStatus::Failed);
          break;
        }
        // draft every free unit of the attacker type, newcomers included
        for (const Unit& u : s.units)
          if (u.owner == exec.me && u.type == a.unit_type && exec.claims.count(u.id) == 0)
            detail::claim(exec, ei, u.id);
        if (es.units.empty()) {
          es.status = EntryStatus::Pending;
          break;
        }
        es.status = EntryStatus::Active;
        if (!es.launched) {
          es.wait_ticks++;
          int mid = (s.width + s.height - 2) / 2;
          bool across = false;
          for (int uid : es.units) {
            const Unit* u = s.find_unit(uid);
            if (u != nullptr &&
                (exec.me == Player::P1 ? u->pos.x + u->pos.y > mid : u->pos.x + u->pos.y < mid))
              across = true;
          }
          if (static_cast<int>(es.units.size()) >= k_attack_wave_min || across ||
              es.wait_ticks > k_attack_wave_patience)
            es.launched = true;
        }
        if (!es.launched) break;  // rally at home until the wave is ready
        const UnitStats& st = s.stats.of(a.unit_type);
        for (int uid : es.units) {
          const Unit* u = s.find_unit(uid);
          if (u == nullptr || !u->idle() || acted(uid)) continue;
          std::vector<const Unit*> ordered = victims;
          std::sort(ordered.begin(), ordered.end(), [&](const Unit* x, const Unit* y) {
            int dx = manhattan(u->pos, x->pos), dy = manhattan(u->pos, y->pos);
            return dx != dy ? dx < dy : x->id < y->id;
          });
          for (const Unit* v : ordered) {
            if (chebyshev(u->pos, v->pos) <= st.attack_range) {
              out[uid] = AtomicAction::attack(v->pos);
              break;
            }
            AtomicAction mv;
            if (detail::step_toward(s, *u, v->pos, mv) && action_legal(s, *u, mv, shadow_stock)) {
              out[uid] = mv;
              break;
            }
          }
        }
        break;
      }
    }
  }

  return out;
}

}  // namespace sap
